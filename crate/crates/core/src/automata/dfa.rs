//! Dense transition-table DFAs.
//!
//! The table is row-major: `table[state * ncols + col]`, one column
//! per alphabet symbol, with [`DEAD`] marking a missing transition.
//! A `byte -> column` lookup table is kept alongside so the matching
//! engines can step on raw input bytes without a search.

use std::collections::HashMap;

use crate::automata::{AutomataError, Nfa};
use crate::{StateId, DEAD};

/// Default subset-construction state cap.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

const NO_COLUMN: u16 = u16::MAX;

#[derive(Clone, PartialEq, Eq)]
pub struct Dfa {
    state_count: usize,
    alphabet: Vec<char>,
    table: Vec<StateId>,
    start: StateId,
    finals: Vec<bool>,
    byte_to_col: Box<[u16; 256]>,
}

impl std::fmt::Debug for Dfa {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dfa")
            .field("state_count", &self.state_count)
            .field("alphabet", &self.alphabet)
            .field("start", &self.start)
            .field("finals", &self.finals)
            .field("table", &self.table)
            .finish()
    }
}

impl Dfa {
    /// Builds a DFA after checking every structural invariant:
    /// distinct alphabet symbols, `state_count * ncols` table entries,
    /// all ids in range. Use this for any table of untrusted origin.
    pub fn new(
        state_count: usize,
        alphabet: Vec<char>,
        table: Vec<StateId>,
        start: StateId,
        final_ids: &[StateId],
    ) -> Result<Dfa, AutomataError> {
        if state_count == 0 {
            return Err(AutomataError::Invariant(
                "a DFA needs at least one state".into(),
            ));
        }
        for (i, c) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(c) {
                return Err(AutomataError::Invariant(format!("duplicate symbol {c:?}")));
            }
        }
        if table.len() != state_count * alphabet.len() {
            return Err(AutomataError::Invariant(format!(
                "table has {} entries, expected {} states x {} symbols",
                table.len(),
                state_count,
                alphabet.len()
            )));
        }
        if start as usize >= state_count {
            return Err(AutomataError::Invariant(format!(
                "start state {start} out of range"
            )));
        }
        for &entry in &table {
            if entry != DEAD && entry as usize >= state_count {
                return Err(AutomataError::Invariant(format!(
                    "transition target {entry} out of range"
                )));
            }
        }
        let mut finals = vec![false; state_count];
        for &id in final_ids {
            if id as usize >= state_count {
                return Err(AutomataError::Invariant(format!(
                    "final state {id} out of range"
                )));
            }
            finals[id as usize] = true;
        }
        Ok(Dfa::assemble(state_count, alphabet, table, start, finals))
    }

    /// Internal constructor for builders whose output is valid by
    /// construction.
    pub(crate) fn assemble(
        state_count: usize,
        alphabet: Vec<char>,
        table: Vec<StateId>,
        start: StateId,
        finals: Vec<bool>,
    ) -> Dfa {
        let mut byte_to_col = Box::new([NO_COLUMN; 256]);
        for (col, &c) in alphabet.iter().enumerate() {
            if (c as u32) < 256 {
                byte_to_col[c as usize] = col as u16;
            }
        }
        Dfa {
            state_count,
            alphabet,
            table,
            start,
            finals,
            byte_to_col,
        }
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn ncols(&self) -> usize {
        self.alphabet.len()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn is_final(&self, state: StateId) -> bool {
        self.finals[state as usize]
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.finals
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(id, _)| id as StateId)
    }

    /// Raw table entry; may be [`DEAD`].
    #[inline(always)]
    pub fn entry(&self, state: StateId, col: usize) -> StateId {
        self.table[state as usize * self.alphabet.len() + col]
    }

    /// Column of an input byte, `None` when the byte is not a symbol.
    #[inline(always)]
    pub fn col_of_byte(&self, byte: u8) -> Option<usize> {
        let col = self.byte_to_col[byte as usize];
        (col != NO_COLUMN).then_some(col as usize)
    }

    pub fn col_of_char(&self, c: char) -> Option<usize> {
        self.alphabet.iter().position(|&a| a == c)
    }

    /// Steps on a character; `None` when the character is not in the
    /// alphabet, [`DEAD`] possible otherwise.
    pub fn step(&self, state: StateId, c: char) -> Option<StateId> {
        self.col_of_char(c).map(|col| self.entry(state, col))
    }

    /// True when no entry is [`DEAD`]. A complete DFA can never die
    /// mid-input, which the speculation machinery exploits.
    pub fn is_complete(&self) -> bool {
        !self.table.contains(&DEAD)
    }
}

/// Standard subset construction, discovering states breadth-first from
/// the ε-closure of the NFA start, with the table layout of [`Dfa`].
/// Column order follows the NFA alphabet. Fails with `StateExplosion`
/// past `max_states` discovered subsets.
pub fn subset_construct_capped(nfa: &Nfa, max_states: usize) -> Result<Dfa, AutomataError> {
    let alphabet = nfa.alphabet().to_vec();
    let n = nfa.state_count();

    let closure_of = |seed: &[StateId]| -> Vec<StateId> {
        let mut mask = vec![false; n];
        let mut stack: Vec<StateId> = Vec::new();
        for &s in seed {
            if !mask[s as usize] {
                mask[s as usize] = true;
                stack.push(s);
            }
        }
        while let Some(state) = stack.pop() {
            for &(label, to) in nfa.edges_from(state) {
                if label.is_none() && !mask[to as usize] {
                    mask[to as usize] = true;
                    stack.push(to);
                }
            }
        }
        (0..n as StateId).filter(|&s| mask[s as usize]).collect()
    };

    let start_subset = closure_of(&[nfa.start()]);
    let mut ids: HashMap<Vec<StateId>, StateId> = HashMap::new();
    ids.insert(start_subset.clone(), 0);
    let mut subsets = vec![start_subset];
    let mut table: Vec<StateId> = Vec::new();

    // `subsets` doubles as the BFS queue: ids are handed out in
    // discovery order and rows are processed in id order.
    let mut current = 0usize;
    while current < subsets.len() {
        let subset = subsets[current].clone();
        for &symbol in &alphabet {
            let mut moved: Vec<StateId> = Vec::new();
            for &s in &subset {
                for &(label, to) in nfa.edges_from(s) {
                    if label == Some(symbol) && !moved.contains(&to) {
                        moved.push(to);
                    }
                }
            }
            if moved.is_empty() {
                table.push(DEAD);
                continue;
            }
            let target = closure_of(&moved);
            let next_id = subsets.len() as StateId;
            let id = *ids.entry(target.clone()).or_insert_with(|| {
                subsets.push(target);
                next_id
            });
            if subsets.len() > max_states {
                return Err(AutomataError::StateExplosion { limit: max_states });
            }
            table.push(id);
        }
        current += 1;
    }

    let finals = subsets
        .iter()
        .map(|subset| subset.binary_search(&nfa.accept()).is_ok())
        .collect();
    Ok(Dfa::assemble(subsets.len(), alphabet, table, 0, finals))
}

/// [`subset_construct_capped`] with [`DEFAULT_STATE_CAP`].
pub fn subset_construct(nfa: &Nfa) -> Result<Dfa, AutomataError> {
    subset_construct_capped(nfa, DEFAULT_STATE_CAP)
}

/// Builds the complete DFA that scans a text for `literal` as a
/// substring: it accepts inputs ending with the literal, and every
/// interior occurrence passes through the accepting state on the way.
/// State `k` means "the last characters read form a length-`k` suffix
/// of the literal and no full match ended earlier"; mismatches fall
/// back along the prefix function, as in Knuth-Morris-Pratt.
pub fn build_search_dfa(literal: &str, alphabet: &str) -> Result<Dfa, AutomataError> {
    let lit: Vec<char> = literal.chars().collect();
    let al: Vec<char> = alphabet.chars().collect();
    if lit.is_empty() {
        return Err(AutomataError::EmptyLiteral);
    }
    for (i, c) in al.iter().enumerate() {
        if al[..i].contains(c) {
            return Err(AutomataError::Invariant(format!("duplicate symbol {c:?}")));
        }
    }
    for &c in &lit {
        if !al.contains(&c) {
            return Err(AutomataError::LiteralNotInAlphabet { symbol: c });
        }
    }

    let m = lit.len();
    // border[k] = length of the longest proper border of lit[..k]
    let mut border = vec![0usize; m + 1];
    let mut b = 0usize;
    for i in 1..m {
        while b > 0 && lit[i] != lit[b] {
            b = border[b];
        }
        if lit[i] == lit[b] {
            b += 1;
        }
        border[i + 1] = b;
    }

    let ncols = al.len();
    let mut table = vec![DEAD; (m + 1) * ncols];
    for (col, &c) in al.iter().enumerate() {
        table[col] = if c == lit[0] { 1 } else { 0 };
    }
    for k in 1..=m {
        for col in 0..ncols {
            table[k * ncols + col] = if k < m && lit[k] == al[col] {
                (k + 1) as StateId
            } else {
                table[border[k] * ncols + col]
            };
        }
    }

    let mut finals = vec![false; m + 1];
    finals[m] = true;
    Ok(Dfa::assemble(m + 1, al, table, 0, finals))
}
