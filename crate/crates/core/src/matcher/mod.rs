//! DFA execution engines.
//!
//! [`run_sequential`] walks the whole input from the start state.
//! [`run_parem`] splits the input into chunks and runs them in
//! parallel: every non-initial chunk cannot know its true entry state,
//! so it speculates a candidate set from the transition table (states
//! reachable on the characters just before the chunk that can also
//! take the chunk's first character), walks one route per candidate,
//! and the routes are stitched back together by composing per-chunk
//! summaries. [`run_enum`] is the baseline that speculates nothing and
//! starts every non-initial chunk from all states.
//!
//! A [`SegmentSummary`] maps each possible entry state of a chunk to
//! where that route ended, how many final-state visits it made, and
//! whether it died. Composition of summaries is associative, so the
//! stitch order does not matter; [`Reduction`] picks left fold or a
//! balanced tree.

mod engine;

pub use engine::{
    run_chunk, run_chunk_traced, run_enum, run_parem, run_parem_traced, run_parem_with,
    run_sequential, Reduction,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::automata::Dfa;
use crate::{StateId, DEAD};

/// What the caller wants to know: bare acceptance, or the number of
/// final-state visits (substring occurrences, for a search DFA).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    Accept,
    Count,
}

/// Ordered set of state ids. Speculation sets are tiny, so a BTreeSet
/// keeps them deterministic and cheap to intersect.
pub type StateSet = BTreeSet<StateId>;

/// A contiguous slice of the input owned by one worker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chunk<'a> {
    pub index: usize,
    /// Byte offset of `text` within the full input.
    pub offset: usize,
    pub text: &'a [u8],
    /// Last byte of the previous chunk; `None` for chunk 0.
    pub boundary_char: Option<u8>,
}

/// Splits `input` into `p` contiguous chunks of `len / p` bytes each,
/// the remainder going to the last chunk. `p` is clamped to at least 1
/// and at most the input length, so non-initial chunks are never
/// empty.
pub fn chunk_input(input: &[u8], p: usize) -> Vec<Chunk<'_>> {
    let p = p.max(1).min(input.len().max(1));
    let base = input.len() / p;
    (0..p)
        .map(|index| {
            let lo = index * base;
            let hi = if index + 1 == p {
                input.len()
            } else {
                lo + base
            };
            Chunk {
                index,
                offset: lo,
                text: &input[lo..hi],
                boundary_char: if index == 0 {
                    None
                } else {
                    Some(input[lo - 1])
                },
            }
        })
        .collect()
}

/// Where a single route ended up after its chunk: final state, number
/// of final-state visits along the way, and whether it hit a dead
/// entry. For a dead route `end` is the last state before death and
/// `hits` stops accumulating there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteDigest {
    pub end: StateId,
    pub hits: u64,
    pub dead: bool,
}

/// Digests of one input segment, keyed by entry state. Composable; see
/// [`compose_summaries`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SegmentSummary {
    map: BTreeMap<StateId, RouteDigest>,
}

impl SegmentSummary {
    pub fn new() -> SegmentSummary {
        SegmentSummary::default()
    }

    /// Identity element of composition over a `state_count`-state DFA:
    /// the summary of an empty segment, where every state maps to
    /// itself.
    pub fn identity(state_count: usize) -> SegmentSummary {
        let map = (0..state_count as StateId)
            .map(|q| {
                (
                    q,
                    RouteDigest {
                        end: q,
                        hits: 0,
                        dead: false,
                    },
                )
            })
            .collect();
        SegmentSummary { map }
    }

    pub fn insert(&mut self, start: StateId, digest: RouteDigest) {
        self.map.insert(start, digest);
    }

    pub fn get(&self, start: StateId) -> Option<&RouteDigest> {
        self.map.get(&start)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, &RouteDigest)> {
        self.map.iter().map(|(&q, d)| (q, d))
    }

    pub fn domain(&self) -> StateSet {
        self.map.keys().copied().collect()
    }
}

impl FromIterator<(StateId, RouteDigest)> for SegmentSummary {
    fn from_iter<T: IntoIterator<Item = (StateId, RouteDigest)>>(iter: T) -> SegmentSummary {
        SegmentSummary {
            map: iter.into_iter().collect(),
        }
    }
}

/// One speculative walk through a chunk, with the full state sequence.
/// Produced only by the traced paths; the fast paths keep digests
/// instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub start: StateId,
    /// State after each consumed character, truncated at death.
    pub visited: Vec<StateId>,
    pub hits: u64,
    pub dead: bool,
}

impl Route {
    /// Final entry of `visited`, or the start state for an empty walk.
    pub fn end(&self) -> StateId {
        self.visited.last().copied().unwrap_or(self.start)
    }
}

/// Errors from the matching engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatcherError {
    /// An input byte has no column in the DFA alphabet. `position` is
    /// the byte offset in the full input where known.
    SymbolNotInAlphabet { byte: u8, position: Option<usize> },
    /// Composition met a live route ending in a state the next summary
    /// has no entry for. The engines build summaries that cover every
    /// reachable boundary state, so this only surfaces through direct
    /// [`compose_summaries`] use on hand-built summaries.
    MissingRoute { state: StateId },
}

impl MatcherError {
    pub(crate) fn at(self, position: usize) -> MatcherError {
        match self {
            MatcherError::SymbolNotInAlphabet { byte, .. } => MatcherError::SymbolNotInAlphabet {
                byte,
                position: Some(position),
            },
            other => other,
        }
    }

    pub(crate) fn position(&self) -> Option<usize> {
        match self {
            MatcherError::SymbolNotInAlphabet { position, .. } => *position,
            MatcherError::MissingRoute { .. } => None,
        }
    }
}

impl fmt::Display for MatcherError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatcherError::SymbolNotInAlphabet {
                byte,
                position: Some(position),
            } => {
                write!(
                    f,
                    "input byte 0x{byte:02x} at offset {position} is not in the alphabet"
                )
            }
            MatcherError::SymbolNotInAlphabet {
                byte,
                position: None,
            } => {
                write!(f, "byte 0x{byte:02x} is not in the alphabet")
            }
            MatcherError::MissingRoute { state } => {
                write!(f, "no route starts at state {state} in the next segment")
            }
        }
    }
}

impl std::error::Error for MatcherError {}

/// Engine verdict. `end_state` is `None` when the walk died;
/// `count` is populated in [`MatchMode::Count`] and zero otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchReport {
    pub mode: MatchMode,
    pub accepted: bool,
    pub count: u64,
    pub end_state: Option<StateId>,
}

impl MatchReport {
    pub(crate) fn from_walk(
        dfa: &Dfa,
        mode: MatchMode,
        end: Option<StateId>,
        hits: u64,
    ) -> MatchReport {
        MatchReport {
            mode,
            accepted: end.is_some_and(|s| dfa.is_final(s)),
            count: match mode {
                MatchMode::Count => hits,
                MatchMode::Accept => 0,
            },
            end_state: end,
        }
    }
}

/// Speculation sizes for one chunk. Chunk 0 needs no speculation and
/// reports `s_len == l_len == 0`, `r_len == 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkStats {
    /// States able to take the chunk's first character.
    pub s_len: usize,
    /// States reachable on the boundary character.
    pub l_len: usize,
    /// Speculative start states actually walked by `run_parem`.
    pub r_len: usize,
}

/// Route accounting for one parallel run. `routes_executed` is what
/// the engine actually walked (speculative routes for `run_parem`,
/// all states per non-initial chunk for `run_enum`); the two totals
/// are what each strategy would walk for this input, so the ratio of
/// the baselines is visible regardless of which engine produced the
/// stats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeculationStats {
    pub chunks: Vec<ChunkStats>,
    pub routes_executed: u64,
    pub total_routes_parem: u64,
    pub total_routes_enum: u64,
}

/// Per-chunk trace from [`run_parem_traced`]: the start set the chunk
/// speculated and the full route walked from each start. Memory is
/// proportional to the input, so this is for tests and diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkTrace {
    pub index: usize,
    pub starts: StateSet,
    pub routes: Vec<Route>,
}

/// States with a live transition on `first_char`: the states a chunk
/// starting with that character could possibly be entered in without
/// dying immediately.
pub fn compute_s(dfa: &Dfa, first_char: u8) -> Result<StateSet, MatcherError> {
    let col = dfa
        .col_of_byte(first_char)
        .ok_or(MatcherError::SymbolNotInAlphabet {
            byte: first_char,
            position: None,
        })?;
    Ok((0..dfa.state_count() as StateId)
        .filter(|&q| dfa.entry(q, col) != DEAD)
        .collect())
}

/// Live destinations on `boundary_char`: the states the previous chunk
/// could possibly hand over after ending with that character.
pub fn compute_l(dfa: &Dfa, boundary_char: u8) -> Result<StateSet, MatcherError> {
    let col = dfa
        .col_of_byte(boundary_char)
        .ok_or(MatcherError::SymbolNotInAlphabet {
            byte: boundary_char,
            position: None,
        })?;
    Ok((0..dfa.state_count() as StateId)
        .map(|q| dfa.entry(q, col))
        .filter(|&dest| dest != DEAD)
        .collect())
}

/// Speculative start set for a chunk: `{start}` for chunk 0, otherwise
/// the intersection of [`compute_s`] on the chunk's first character
/// with [`compute_l`] on the boundary character.
///
/// Non-initial chunks are never empty (see [`chunk_input`]); passing
/// one is a caller bug.
pub fn speculate_starts(dfa: &Dfa, chunk: &Chunk<'_>) -> Result<StateSet, MatcherError> {
    if chunk.index == 0 {
        return Ok(StateSet::from([dfa.start()]));
    }
    let first = *chunk
        .text
        .first()
        .expect("non-initial chunks are never empty");
    let boundary = chunk
        .boundary_char
        .expect("non-initial chunks have a boundary character");
    let s = compute_s(dfa, first)?;
    let l = compute_l(dfa, boundary)?;
    Ok(s.intersection(&l).copied().collect())
}

/// Composes two adjacent segment summaries into the summary of the
/// combined segment. A dead left route stays as it is (whatever the
/// right segment does is unreachable); a live one continues from its
/// end state, which must be in the right summary's domain.
pub fn compose_summaries(
    left: &SegmentSummary,
    right: &SegmentSummary,
) -> Result<SegmentSummary, MatcherError> {
    let mut map = BTreeMap::new();
    for (start, digest) in left.iter() {
        let combined = if digest.dead {
            *digest
        } else {
            match right.get(digest.end) {
                Some(next) => RouteDigest {
                    end: next.end,
                    hits: digest.hits + next.hits,
                    dead: next.dead,
                },
                None => return Err(MatcherError::MissingRoute { state: digest.end }),
            }
        };
        map.insert(start, combined);
    }
    Ok(SegmentSummary { map })
}
