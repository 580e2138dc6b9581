//! Automata construction, simplification and serialization.

mod dfa;
mod nfa;
mod table;

pub use dfa::{
    build_search_dfa, subset_construct, subset_construct_capped, Dfa, DEFAULT_STATE_CAP,
};
pub use nfa::{nfa_simulate, simplify_nfa, thompson_nfa, Label, Nfa};
pub use table::{export_dfa_table, export_dot, load_dfa_table};

use std::fmt;

/// Errors from DFA construction and (de)serialization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutomataError {
    /// Subset construction exceeded the configured state cap.
    StateExplosion { limit: usize },
    /// A search-literal character is missing from the given alphabet.
    LiteralNotInAlphabet { symbol: char },
    /// The search literal is empty.
    EmptyLiteral,
    /// A transition-table file could not be parsed. Lines are 1-based.
    TableParse { line: usize, message: String },
    /// A structurally well-formed table violates a DFA invariant
    /// (duplicate symbol, out-of-range state id, wrong row width).
    Invariant(String),
}

impl fmt::Display for AutomataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutomataError::StateExplosion { limit } => {
                write!(f, "subset construction exceeded {limit} states")
            }
            AutomataError::LiteralNotInAlphabet { symbol } => {
                write!(f, "literal character {symbol:?} is not in the alphabet")
            }
            AutomataError::EmptyLiteral => write!(f, "search literal is empty"),
            AutomataError::TableParse { line, message } => {
                write!(f, "table parse error on line {line}: {message}")
            }
            AutomataError::Invariant(message) => write!(f, "invalid DFA: {message}"),
        }
    }
}

impl std::error::Error for AutomataError {}
