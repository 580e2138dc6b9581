//! Text serialization of transition tables, plus DOT rendering.
//!
//! The table format is line-oriented UTF-8 with LF endings and
//! tab-separated fields:
//!
//! ```text
//! symbols<TAB>p<TAB>a<TAB>r<TAB>e<TAB>l
//! start<TAB>0
//! finals<TAB>8
//! 0<TAB>1<TAB>0<TAB>0<TAB>0<TAB>0
//! ...
//! ```
//!
//! One row per state, in id order, one destination per symbol column;
//! `-` marks a missing transition. A DFA with no final states (or an
//! empty alphabet) keeps the bare header keyword on its line.

use std::fmt::Write as _;

use crate::automata::{AutomataError, Dfa};
use crate::{StateId, DEAD};

/// Renders a DFA in the table format. [`load_dfa_table`] inverts this
/// exactly.
pub fn export_dfa_table(dfa: &Dfa) -> String {
    let mut out = String::new();
    out.push_str("symbols");
    for &c in dfa.alphabet() {
        out.push('\t');
        out.push(c);
    }
    out.push('\n');
    let _ = writeln!(out, "start\t{}", dfa.start());
    out.push_str("finals");
    for id in dfa.finals() {
        let _ = write!(out, "\t{id}");
    }
    out.push('\n');
    for state in 0..dfa.state_count() as StateId {
        let _ = write!(out, "{state}");
        for col in 0..dfa.ncols() {
            match dfa.entry(state, col) {
                DEAD => out.push_str("\t-"),
                dest => {
                    let _ = write!(out, "\t{dest}");
                }
            }
        }
        out.push('\n');
    }
    out
}

fn parse_error(line: usize, message: impl Into<String>) -> AutomataError {
    AutomataError::TableParse {
        line,
        message: message.into(),
    }
}

fn parse_id(field: &str, line: usize, what: &str) -> Result<StateId, AutomataError> {
    field
        .parse::<StateId>()
        .map_err(|_| parse_error(line, format!("{what} is not a state id: {field:?}")))
}

/// Parses the table format back into a validated [`Dfa`]. Parse errors
/// carry the offending 1-based line number; structural problems (bad
/// ids, wrong row widths) surface as `Invariant` errors.
pub fn load_dfa_table(text: &str) -> Result<Dfa, AutomataError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (line_no, symbols_line) = lines
        .next()
        .ok_or_else(|| parse_error(1, "missing symbols line"))?;
    let mut fields = symbols_line.split('\t');
    if fields.next() != Some("symbols") {
        return Err(parse_error(
            line_no,
            "expected a line starting with `symbols`",
        ));
    }
    let mut alphabet = Vec::new();
    for field in fields {
        let mut chars = field.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => alphabet.push(c),
            _ => {
                return Err(parse_error(
                    line_no,
                    format!("symbol must be a single character: {field:?}"),
                ))
            }
        }
    }

    let (line_no, start_line) = lines
        .next()
        .ok_or_else(|| parse_error(2, "missing start line"))?;
    let start = match start_line.split('\t').collect::<Vec<_>>().as_slice() {
        ["start", id] => parse_id(id, line_no, "start state")?,
        _ => return Err(parse_error(line_no, "expected `start<TAB><id>`")),
    };

    let (line_no, finals_line) = lines
        .next()
        .ok_or_else(|| parse_error(3, "missing finals line"))?;
    let mut fields = finals_line.split('\t');
    if fields.next() != Some("finals") {
        return Err(parse_error(
            line_no,
            "expected a line starting with `finals`",
        ));
    }
    let mut final_ids = Vec::new();
    for field in fields {
        final_ids.push(parse_id(field, line_no, "final state")?);
    }

    let ncols = alphabet.len();
    let mut table: Vec<StateId> = Vec::new();
    let mut state_count = 0usize;
    for (line_no, row) in lines {
        let mut fields = row.split('\t');
        let id_field = fields.next().expect("split yields at least one field");
        let id = parse_id(id_field, line_no, "row state")?;
        if id as usize != state_count {
            return Err(parse_error(
                line_no,
                format!("row for state {id} out of order, expected {state_count}"),
            ));
        }
        let mut width = 0usize;
        for field in fields {
            let dest = if field == "-" {
                DEAD
            } else {
                parse_id(field, line_no, "destination")?
            };
            table.push(dest);
            width += 1;
        }
        if width != ncols {
            return Err(parse_error(
                line_no,
                format!("row has {width} destinations, expected {ncols}"),
            ));
        }
        state_count += 1;
    }
    if state_count == 0 {
        return Err(parse_error(4, "expected at least one state row"));
    }

    Dfa::new(state_count, alphabet, table, start, &final_ids)
}

fn dot_symbol(c: char) -> String {
    match c {
        '"' => "\\\"".to_string(),
        '\\' => "\\\\".to_string(),
        other => other.to_string(),
    }
}

/// Renders a DFA as a GraphViz digraph: doublecircle for final states,
/// one labeled edge per non-dead table entry, dead entries omitted.
pub fn export_dot(dfa: &Dfa) -> String {
    let mut out = String::from("digraph dfa {\n  rankdir=LR;\n");
    for state in 0..dfa.state_count() as StateId {
        let shape = if dfa.is_final(state) {
            "doublecircle"
        } else {
            "circle"
        };
        let _ = writeln!(out, "  {state} [shape={shape}];");
    }
    for state in 0..dfa.state_count() as StateId {
        for col in 0..dfa.ncols() {
            let dest = dfa.entry(state, col);
            if dest != DEAD {
                let _ = writeln!(
                    out,
                    "  {state} -> {dest} [label=\"{}\"];",
                    dot_symbol(dfa.alphabet()[col])
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::build_search_dfa;

    #[test]
    fn export_golden_search_table() {
        let dfa = build_search_dfa("parallel", "parel").unwrap();
        let expected = "\
symbols\tp\ta\tr\te\tl
start\t0
finals\t8
0\t1\t0\t0\t0\t0
1\t1\t2\t0\t0\t0
2\t1\t0\t3\t0\t0
3\t1\t4\t0\t0\t0
4\t1\t0\t0\t0\t5
5\t1\t0\t0\t0\t6
6\t1\t0\t0\t7\t0
7\t1\t0\t0\t0\t8
8\t1\t0\t0\t0\t0
";
        assert_eq!(export_dfa_table(&dfa), expected);
    }

    #[test]
    fn roundtrip_is_identity() {
        let dfa = build_search_dfa("parallel", "parel").unwrap();
        assert_eq!(load_dfa_table(&export_dfa_table(&dfa)).unwrap(), dfa);
    }

    #[test]
    fn roundtrip_partial_dfa_with_dead_entries() {
        let dfa = Dfa::new(3, vec!['a', 'b'], vec![1, DEAD, DEAD, 2, 2, DEAD], 0, &[2]).unwrap();
        let text = export_dfa_table(&dfa);
        assert!(text.contains("\t-"));
        assert_eq!(load_dfa_table(&text).unwrap(), dfa);
    }

    #[test]
    fn roundtrip_empty_alphabet_and_no_finals() {
        let dfa = Dfa::new(1, vec![], vec![], 0, &[0]).unwrap();
        let text = export_dfa_table(&dfa);
        assert_eq!(text, "symbols\nstart\t0\nfinals\t0\n0\n");
        assert_eq!(load_dfa_table(&text).unwrap(), dfa);

        let no_finals = Dfa::new(1, vec!['a'], vec![0], 0, &[]).unwrap();
        let text = export_dfa_table(&no_finals);
        assert!(text.contains("\nfinals\n"));
        assert_eq!(load_dfa_table(&text).unwrap(), no_finals);
    }

    #[test]
    fn load_reports_line_numbers() {
        let text = "symbols\ta\nstart\t0\nfinals\n0\tx\n";
        assert_eq!(
            load_dfa_table(text),
            Err(AutomataError::TableParse {
                line: 4,
                message: "destination is not a state id: \"x\"".into()
            })
        );
        assert!(matches!(
            load_dfa_table("symbols\tab\nstart\t0\nfinals\n0\t-\n"),
            Err(AutomataError::TableParse { line: 1, .. })
        ));
        assert!(matches!(
            load_dfa_table("symbols\ta\nstart\nfinals\n0\t-\n"),
            Err(AutomataError::TableParse { line: 2, .. })
        ));
        assert!(matches!(
            load_dfa_table("symbols\ta\nstart\t0\nfinals\n1\t-\n"),
            Err(AutomataError::TableParse { line: 4, .. })
        ));
        assert!(matches!(
            load_dfa_table("symbols\ta\nstart\t0\nfinals\n"),
            Err(AutomataError::TableParse { line: 4, .. })
        ));
    }

    #[test]
    fn load_rejects_invariant_violations() {
        // transition target past the last row
        assert!(matches!(
            load_dfa_table("symbols\ta\nstart\t0\nfinals\n0\t3\n"),
            Err(AutomataError::Invariant(_))
        ));
        // final id out of range
        assert!(matches!(
            load_dfa_table("symbols\ta\nstart\t0\nfinals\t7\n0\t0\n"),
            Err(AutomataError::Invariant(_))
        ));
        // row width mismatch
        assert!(matches!(
            load_dfa_table("symbols\ta\tb\nstart\t0\nfinals\n0\t0\n"),
            Err(AutomataError::TableParse { line: 4, .. })
        ));
    }

    #[test]
    fn dot_counts_for_search_dfa() {
        let dfa = build_search_dfa("parallel", "parel").unwrap();
        let dot = export_dot(&dfa);
        assert_eq!(dot.matches("[shape=").count(), 9);
        assert_eq!(dot.matches("doublecircle").count(), 1);
        assert_eq!(dot.matches(" -> ").count(), 45);
    }

    #[test]
    fn dot_single_state_no_transitions() {
        let dfa = Dfa::new(1, vec![], vec![], 0, &[]).unwrap();
        let dot = export_dot(&dfa);
        assert_eq!(
            dot,
            "digraph dfa {\n  rankdir=LR;\n  0 [shape=circle];\n}\n"
        );
    }

    #[test]
    fn dot_escapes_quote_and_backslash_labels() {
        let dfa = Dfa::new(1, vec!['"', '\\'], vec![0, 0], 0, &[]).unwrap();
        let dot = export_dot(&dfa);
        assert!(dot.contains("label=\"\\\"\""));
        assert!(dot.contains("label=\"\\\\\""));
    }

    #[test]
    fn dead_entries_are_omitted_from_dot() {
        let dfa = Dfa::new(2, vec!['a'], vec![1, DEAD], 0, &[1]).unwrap();
        let dot = export_dot(&dfa);
        assert_eq!(dot.matches(" -> ").count(), 1);
    }
}
