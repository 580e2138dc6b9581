//! Pattern lexing and parsing.
//!
//! Supported operators: concatenation by adjacency, `a*` (zero or
//! more), `a|b` (union), `a+` (one or more), `[0..9]` (inclusive
//! character range in code-point order), `a?` (optional) and `(...)`
//! grouping. A backslash escapes the following character into a plain
//! symbol, so `\*` matches a literal asterisk.
//!
//! Postfix quantifiers bind tightest, then concatenation, then union;
//! parentheses override. Grouping is purely structural: `(a|b)` parses
//! to the same tree as the `a|b` inside it. Nested unions and
//! concatenations of the same kind are flattened into one n-ary node,
//! so `a|b|c` has a single `Union` with three children.

use std::fmt;

/// Lexical token kind. `Symbol` carries the literal character, with
/// any escaping already resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Symbol(char),
    Star,
    Plus,
    Question,
    Pipe,
    LParen,
    RParen,
    LBracket,
    RangeDots,
    RBracket,
}

/// A token and its 0-based byte position in the pattern text. For an
/// escaped symbol the position is that of the backslash.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub position: usize,
}

/// Errors produced by [`tokenize`] and [`parse`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    /// The pattern ends in a lone backslash.
    TrailingBackslash { position: usize },
    /// `..` appeared outside a `[...]` construct.
    StrayRangeDots { position: usize },
    /// Unmatched `(` or `)`.
    UnbalancedParen { position: usize },
    /// An operand is missing: empty pattern, `()`, `a||b`, or a
    /// quantifier with nothing to attach to.
    EmptySubexpression { position: usize },
    /// Malformed `[x..y]` construct, or endpoints out of order.
    InvalidRange {
        position: usize,
        reason: &'static str,
    },
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntaxError::TrailingBackslash { position } => {
                write!(f, "trailing backslash at offset {position}")
            }
            SyntaxError::StrayRangeDots { position } => {
                write!(f, "`..` outside a range at offset {position}")
            }
            SyntaxError::UnbalancedParen { position } => {
                write!(f, "unbalanced parenthesis at offset {position}")
            }
            SyntaxError::EmptySubexpression { position } => {
                write!(f, "empty subexpression at offset {position}")
            }
            SyntaxError::InvalidRange { position, reason } => {
                write!(f, "invalid range at offset {position}: {reason}")
            }
        }
    }
}

impl std::error::Error for SyntaxError {}

/// Splits a pattern into tokens. `..` is only meaningful between `[`
/// and `]`; anywhere else it is an error rather than two literal dots,
/// which keeps `a..b` from silently matching three characters. A
/// single `.` is an ordinary symbol.
pub fn tokenize(pattern: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut tokens = Vec::new();
    let mut in_brackets = false;
    let mut iter = pattern.char_indices().peekable();
    while let Some((position, c)) = iter.next() {
        let kind = match c {
            '\\' => match iter.next() {
                Some((_, escaped)) => TokenKind::Symbol(escaped),
                None => return Err(SyntaxError::TrailingBackslash { position }),
            },
            '*' => TokenKind::Star,
            '+' => TokenKind::Plus,
            '?' => TokenKind::Question,
            '|' => TokenKind::Pipe,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '[' => {
                in_brackets = true;
                TokenKind::LBracket
            }
            ']' => {
                in_brackets = false;
                TokenKind::RBracket
            }
            '.' if matches!(iter.peek(), Some((_, '.'))) => {
                iter.next();
                if !in_brackets {
                    return Err(SyntaxError::StrayRangeDots { position });
                }
                TokenKind::RangeDots
            }
            other => TokenKind::Symbol(other),
        };
        tokens.push(Token { kind, position });
    }
    Ok(tokens)
}

/// Abstract syntax of a pattern. `Concat` and `Union` are n-ary and
/// never directly nest a child of their own kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegexAst {
    Literal(char),
    Concat(Vec<RegexAst>),
    Union(Vec<RegexAst>),
    Star(Box<RegexAst>),
    Plus(Box<RegexAst>),
    Optional(Box<RegexAst>),
    /// Inclusive endpoints, `lo <= hi` guaranteed by the parser.
    Range(char, char),
}

impl RegexAst {
    /// Binding strength for printing: union < concat < quantifier <
    /// atom.
    fn precedence(&self) -> u8 {
        match self {
            RegexAst::Union(_) => 0,
            RegexAst::Concat(_) => 1,
            RegexAst::Star(_) | RegexAst::Plus(_) | RegexAst::Optional(_) => 2,
            RegexAst::Literal(_) | RegexAst::Range(_, _) => 3,
        }
    }
}

fn union_of(parts: Vec<RegexAst>) -> RegexAst {
    if parts.len() == 1 {
        return parts.into_iter().next().unwrap();
    }
    let mut flat = Vec::with_capacity(parts.len());
    for part in parts {
        match part {
            RegexAst::Union(children) => flat.extend(children),
            other => flat.push(other),
        }
    }
    RegexAst::Union(flat)
}

fn concat_of(parts: Vec<RegexAst>) -> RegexAst {
    if parts.len() == 1 {
        return parts.into_iter().next().unwrap();
    }
    let mut flat = Vec::with_capacity(parts.len());
    for part in parts {
        match part {
            RegexAst::Concat(children) => flat.extend(children),
            other => flat.push(other),
        }
    }
    RegexAst::Concat(flat)
}

fn write_symbol(f: &mut fmt::Formatter<'_>, c: char) -> fmt::Result {
    // The dot is always escaped so two adjacent printed symbols can
    // never re-lex as `..`.
    if matches!(
        c,
        '*' | '+' | '?' | '|' | '(' | ')' | '[' | ']' | '.' | '\\'
    ) {
        write!(f, "\\{c}")
    } else {
        write!(f, "{c}")
    }
}

impl fmt::Display for RegexAst {
    /// Prints a pattern that parses back to this exact tree, with
    /// parentheses only where precedence demands them.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(node: &RegexAst, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if node.precedence() < min {
                write!(f, "(")?;
                emit(node, f)?;
                write!(f, ")")
            } else {
                emit(node, f)
            }
        }
        fn emit(node: &RegexAst, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match node {
                RegexAst::Literal(c) => write_symbol(f, *c),
                RegexAst::Range(lo, hi) => {
                    write!(f, "[")?;
                    write_symbol(f, *lo)?;
                    write!(f, "..")?;
                    write_symbol(f, *hi)?;
                    write!(f, "]")
                }
                RegexAst::Concat(parts) => {
                    for part in parts {
                        child(part, 1, f)?;
                    }
                    Ok(())
                }
                RegexAst::Union(parts) => {
                    for (i, part) in parts.iter().enumerate() {
                        if i > 0 {
                            write!(f, "|")?;
                        }
                        child(part, 1, f)?;
                    }
                    Ok(())
                }
                RegexAst::Star(inner) => {
                    child(inner, 2, f)?;
                    write!(f, "*")
                }
                RegexAst::Plus(inner) => {
                    child(inner, 2, f)?;
                    write!(f, "+")
                }
                RegexAst::Optional(inner) => {
                    child(inner, 2, f)?;
                    write!(f, "?")
                }
            }
        }
        emit(self, f)
    }
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    depth: u32,
    pattern_end: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    /// Position for error reporting at the cursor (end of pattern when
    /// no tokens remain).
    fn here(&self) -> usize {
        self.peek().map(|t| t.position).unwrap_or(self.pattern_end)
    }

    fn union(&mut self) -> Result<RegexAst, SyntaxError> {
        let mut parts = vec![self.concat()?];
        while matches!(self.peek_kind(), Some(TokenKind::Pipe)) {
            self.bump();
            parts.push(self.concat()?);
        }
        Ok(union_of(parts))
    }

    fn concat(&mut self) -> Result<RegexAst, SyntaxError> {
        let mut items = Vec::new();
        while matches!(
            self.peek_kind(),
            Some(TokenKind::Symbol(_) | TokenKind::LParen | TokenKind::LBracket)
        ) {
            items.push(self.postfix()?);
        }
        if items.is_empty() {
            // A `)` with nothing open is a paren problem, not a missing
            // operand.
            if self.depth == 0 && matches!(self.peek_kind(), Some(TokenKind::RParen)) {
                return Err(SyntaxError::UnbalancedParen {
                    position: self.here(),
                });
            }
            return Err(SyntaxError::EmptySubexpression {
                position: self.here(),
            });
        }
        Ok(concat_of(items))
    }

    fn postfix(&mut self) -> Result<RegexAst, SyntaxError> {
        let mut node = self.atom()?;
        loop {
            node = match self.peek_kind() {
                Some(TokenKind::Star) => {
                    self.bump();
                    RegexAst::Star(Box::new(node))
                }
                Some(TokenKind::Plus) => {
                    self.bump();
                    RegexAst::Plus(Box::new(node))
                }
                Some(TokenKind::Question) => {
                    self.bump();
                    RegexAst::Optional(Box::new(node))
                }
                _ => return Ok(node),
            };
        }
    }

    fn atom(&mut self) -> Result<RegexAst, SyntaxError> {
        let token = *self.bump().expect("atom caller checked the lookahead");
        match token.kind {
            TokenKind::Symbol(c) => Ok(RegexAst::Literal(c)),
            TokenKind::LParen => {
                self.depth += 1;
                let inner = self.union()?;
                self.depth -= 1;
                match self.peek_kind() {
                    Some(TokenKind::RParen) => {
                        self.bump();
                        Ok(inner)
                    }
                    _ => Err(SyntaxError::UnbalancedParen {
                        position: token.position,
                    }),
                }
            }
            TokenKind::LBracket => self.range(token.position),
            _ => unreachable!("atom caller checked the lookahead"),
        }
    }

    fn range(&mut self, open: usize) -> Result<RegexAst, SyntaxError> {
        let lo = match self.peek_kind() {
            Some(TokenKind::Symbol(c)) => {
                self.bump();
                c
            }
            _ => {
                return Err(SyntaxError::InvalidRange {
                    position: self.here(),
                    reason: "expected a symbol after `[`",
                })
            }
        };
        match self.peek_kind() {
            Some(TokenKind::RangeDots) => {
                self.bump();
            }
            _ => {
                return Err(SyntaxError::InvalidRange {
                    position: self.here(),
                    reason: "expected `..` after the lower endpoint",
                })
            }
        }
        let hi = match self.peek_kind() {
            Some(TokenKind::Symbol(c)) => {
                self.bump();
                c
            }
            _ => {
                return Err(SyntaxError::InvalidRange {
                    position: self.here(),
                    reason: "expected a symbol after `..`",
                })
            }
        };
        match self.peek_kind() {
            Some(TokenKind::RBracket) => {
                self.bump();
            }
            _ => {
                return Err(SyntaxError::InvalidRange {
                    position: self.here(),
                    reason: "unterminated range, expected `]`",
                })
            }
        }
        if lo > hi {
            return Err(SyntaxError::InvalidRange {
                position: open,
                reason: "endpoints out of order",
            });
        }
        Ok(RegexAst::Range(lo, hi))
    }
}

/// Parses a token sequence into an AST.
pub fn parse(tokens: &[Token]) -> Result<RegexAst, SyntaxError> {
    let pattern_end = tokens.last().map(|t| t.position + 1).unwrap_or(0);
    let mut parser = Parser {
        tokens,
        pos: 0,
        depth: 0,
        pattern_end,
    };
    let ast = parser.union()?;
    match parser.peek() {
        None => Ok(ast),
        Some(t) if t.kind == TokenKind::RParen => Err(SyntaxError::UnbalancedParen {
            position: t.position,
        }),
        Some(t) => Err(SyntaxError::InvalidRange {
            position: t.position,
            reason: "stray `]`",
        }),
    }
}

/// [`tokenize`] followed by [`parse`].
pub fn parse_pattern(pattern: &str) -> Result<RegexAst, SyntaxError> {
    parse(&tokenize(pattern)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use RegexAst::*;

    fn lit(c: char) -> RegexAst {
        Literal(c)
    }

    fn kinds(pattern: &str) -> Vec<TokenKind> {
        tokenize(pattern)
            .unwrap()
            .into_iter()
            .map(|t| t.kind)
            .collect()
    }

    #[test]
    fn tokenize_union() {
        assert_eq!(
            kinds("a|b"),
            vec![
                TokenKind::Symbol('a'),
                TokenKind::Pipe,
                TokenKind::Symbol('b')
            ]
        );
    }

    #[test]
    fn tokenize_range() {
        assert_eq!(
            kinds("[0..3]"),
            vec![
                TokenKind::LBracket,
                TokenKind::Symbol('0'),
                TokenKind::RangeDots,
                TokenKind::Symbol('3'),
                TokenKind::RBracket,
            ]
        );
    }

    #[test]
    fn tokenize_escapes() {
        assert_eq!(
            kinds(r"\*\\\|"),
            vec![
                TokenKind::Symbol('*'),
                TokenKind::Symbol('\\'),
                TokenKind::Symbol('|'),
            ]
        );
    }

    #[test]
    fn tokenize_single_dot_is_a_symbol() {
        assert_eq!(
            kinds("a.b"),
            vec![
                TokenKind::Symbol('a'),
                TokenKind::Symbol('.'),
                TokenKind::Symbol('b'),
            ]
        );
    }

    #[test]
    fn tokenize_positions_increase_and_point_at_source() {
        let tokens = tokenize(r"a\*(b)").unwrap();
        let positions: Vec<usize> = tokens.iter().map(|t| t.position).collect();
        assert_eq!(positions, vec![0, 1, 3, 4, 5]);
    }

    #[test]
    fn tokenize_trailing_backslash() {
        assert_eq!(
            tokenize("ab\\"),
            Err(SyntaxError::TrailingBackslash { position: 2 })
        );
    }

    #[test]
    fn tokenize_stray_range_dots() {
        assert_eq!(
            tokenize("a..b"),
            Err(SyntaxError::StrayRangeDots { position: 1 })
        );
        // `..` right after a closed bracket is back outside the range.
        assert_eq!(
            tokenize("[a..b].."),
            Err(SyntaxError::StrayRangeDots { position: 6 })
        );
    }

    #[test]
    fn parse_literal_concat() {
        assert_eq!(
            parse_pattern("abc").unwrap(),
            Concat(vec![lit('a'), lit('b'), lit('c')])
        );
    }

    #[test]
    fn parse_union_of_literal_and_star() {
        // `|` binds loosest, so the star applies to `b` alone.
        assert_eq!(
            parse_pattern("a|b*").unwrap(),
            Union(vec![lit('a'), Star(Box::new(lit('b')))])
        );
    }

    #[test]
    fn parse_grouping_overrides_precedence() {
        assert_eq!(
            parse_pattern("(a|b)*").unwrap(),
            Star(Box::new(Union(vec![lit('a'), lit('b')])))
        );
    }

    #[test]
    fn parse_full_operator_mix() {
        assert_eq!(
            parse_pattern("(a|b)?c*[0..3]b+").unwrap(),
            Concat(vec![
                Optional(Box::new(Union(vec![lit('a'), lit('b')]))),
                Star(Box::new(lit('c'))),
                Range('0', '3'),
                Plus(Box::new(lit('b'))),
            ])
        );
    }

    #[test]
    fn parse_flattens_nested_unions_and_concats() {
        assert_eq!(
            parse_pattern("a|b|c").unwrap(),
            parse_pattern("(a|b)|c").unwrap()
        );
        assert_eq!(
            parse_pattern("a|b|c").unwrap(),
            Union(vec![lit('a'), lit('b'), lit('c')])
        );
        assert_eq!(
            parse_pattern("(ab)c").unwrap(),
            parse_pattern("abc").unwrap()
        );
    }

    #[test]
    fn parse_quantifier_chain() {
        assert_eq!(
            parse_pattern("a*?").unwrap(),
            Optional(Box::new(Star(Box::new(lit('a')))))
        );
    }

    #[test]
    fn parse_degenerate_range_is_allowed() {
        assert_eq!(parse_pattern("[a..a]").unwrap(), Range('a', 'a'));
    }

    #[test]
    fn parse_escaped_operators_are_literals() {
        assert_eq!(
            parse_pattern(r"\(\*").unwrap(),
            Concat(vec![lit('('), lit('*')])
        );
    }

    #[test]
    fn parse_empty_pattern() {
        assert_eq!(
            parse_pattern(""),
            Err(SyntaxError::EmptySubexpression { position: 0 })
        );
    }

    #[test]
    fn parse_empty_group() {
        assert_eq!(
            parse_pattern("()"),
            Err(SyntaxError::EmptySubexpression { position: 1 })
        );
    }

    #[test]
    fn parse_empty_union_arm() {
        assert_eq!(
            parse_pattern("a||b"),
            Err(SyntaxError::EmptySubexpression { position: 2 })
        );
    }

    #[test]
    fn parse_quantifier_without_operand() {
        assert_eq!(
            parse_pattern("*a"),
            Err(SyntaxError::EmptySubexpression { position: 0 })
        );
        assert_eq!(
            parse_pattern("a|*"),
            Err(SyntaxError::EmptySubexpression { position: 2 })
        );
    }

    #[test]
    fn parse_unbalanced_parens() {
        assert_eq!(
            parse_pattern("(a"),
            Err(SyntaxError::UnbalancedParen { position: 0 })
        );
        assert_eq!(
            parse_pattern("a)"),
            Err(SyntaxError::UnbalancedParen { position: 1 })
        );
        assert_eq!(
            parse_pattern(")"),
            Err(SyntaxError::UnbalancedParen { position: 0 })
        );
    }

    #[test]
    fn parse_invalid_ranges() {
        assert!(matches!(
            parse_pattern("[b..a]"),
            Err(SyntaxError::InvalidRange { position: 0, .. })
        ));
        assert!(matches!(
            parse_pattern("[ab..c]"),
            Err(SyntaxError::InvalidRange { .. })
        ));
        assert!(matches!(
            parse_pattern("[a..b"),
            Err(SyntaxError::InvalidRange { .. })
        ));
        assert!(matches!(
            parse_pattern("[..a]"),
            Err(SyntaxError::InvalidRange { .. })
        ));
        assert!(matches!(
            parse_pattern("a]"),
            Err(SyntaxError::InvalidRange { .. })
        ));
    }

    #[test]
    fn display_uses_minimal_parens() {
        let cases = [
            (
                Concat(vec![
                    Union(vec![lit('a'), lit('b')]),
                    Star(Box::new(lit('c'))),
                ]),
                "(a|b)c*",
            ),
            (
                Union(vec![lit('a'), Concat(vec![lit('b'), lit('c')])]),
                "a|bc",
            ),
            (Star(Box::new(Concat(vec![lit('a'), lit('b')]))), "(ab)*"),
            (Star(Box::new(lit('a'))), "a*"),
            (Optional(Box::new(Star(Box::new(lit('a'))))), "a*?"),
            (Concat(vec![lit('.'), lit('.')]), r"\.\."),
            (Range('0', '9'), "[0..9]"),
        ];
        for (ast, expected) in cases {
            assert_eq!(ast.to_string(), expected);
        }
    }

    #[test]
    fn display_roundtrips_to_the_same_tree() {
        let patterns = [
            "(a|b)?c*[0..3]b+",
            "a|b|c",
            r"\*\[x\]",
            "((a|b)c)*d",
            "[a..a]+",
            "a+b?c*",
        ];
        for pattern in patterns {
            let ast = parse_pattern(pattern).unwrap();
            let printed = ast.to_string();
            assert_eq!(
                parse_pattern(&printed).unwrap(),
                ast,
                "pattern {pattern:?} -> {printed:?}"
            );
        }
    }
}
