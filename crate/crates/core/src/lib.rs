//! Regular-expression-to-DFA compilation and parallel DFA matching.
//!
//! The compilation pipeline:
//!
//! ```text
//! pattern --tokenize/parse--> RegexAst --thompson_nfa--> Nfa
//!         --simplify_nfa--> Nfa --subset_construct--> Dfa
//! ```
//!
//! Matching an input against a [`Dfa`] can run three ways:
//!
//! * [`matcher::run_sequential`]: the classical single walk from the
//!   start state.
//! * [`matcher::run_parem`]: domain decomposition. The input is split
//!   into chunks, every non-initial chunk speculates a small set of
//!   states it could possibly be entered in (derived from the
//!   transition table and the characters around the chunk boundary),
//!   runs one route per candidate, and the per-chunk digests are
//!   composed associatively into the final answer.
//! * [`matcher::run_enum`]: the brute-force baseline that starts every
//!   non-initial chunk from all states.
//!
//! All three agree on the result for every input; the parallel engines
//! exist for throughput on long inputs.

pub mod automata;
pub mod matcher;
pub mod syntax;
pub mod testutil;

use std::fmt;

pub use automata::{
    build_search_dfa, export_dfa_table, export_dot, load_dfa_table, nfa_simulate, simplify_nfa,
    subset_construct, subset_construct_capped, thompson_nfa, AutomataError, Dfa, Nfa,
    DEFAULT_STATE_CAP,
};
pub use matcher::{
    chunk_input, compose_summaries, compute_l, compute_s, run_chunk, run_chunk_traced, run_enum,
    run_parem, run_parem_traced, run_parem_with, run_sequential, speculate_starts, Chunk,
    ChunkStats, ChunkTrace, MatchMode, MatchReport, MatcherError, Reduction, Route, RouteDigest,
    SegmentSummary, SpeculationStats, StateSet,
};
pub use syntax::{parse, parse_pattern, tokenize, RegexAst, SyntaxError, Token, TokenKind};

/// Numeric automaton state identifier.
pub type StateId = u32;

/// Sentinel transition target for a missing (dead) DFA entry.
pub const DEAD: StateId = StateId::MAX;

/// Error from the whole pattern-to-DFA pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompileError {
    Syntax(SyntaxError),
    Automata(AutomataError),
}

impl fmt::Display for CompileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompileError::Syntax(e) => write!(f, "{e}"),
            CompileError::Automata(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CompileError {}

impl From<SyntaxError> for CompileError {
    fn from(e: SyntaxError) -> Self {
        CompileError::Syntax(e)
    }
}

impl From<AutomataError> for CompileError {
    fn from(e: AutomataError) -> Self {
        CompileError::Automata(e)
    }
}

/// Compiles a pattern all the way to a DFA. `max_states` caps subset
/// construction (see [`DEFAULT_STATE_CAP`]).
pub fn compile_regex(pattern: &str, max_states: usize) -> Result<Dfa, CompileError> {
    let ast = parse_pattern(pattern)?;
    let nfa = simplify_nfa(&thompson_nfa(&ast));
    Ok(subset_construct_capped(&nfa, max_states)?)
}
