//! Engine internals: chunk execution and the parallel drivers.

use std::collections::BTreeMap;
use std::thread;

use crate::automata::Dfa;
use crate::matcher::{
    chunk_input, compose_summaries, compute_l, compute_s, Chunk, ChunkStats, ChunkTrace, MatchMode,
    MatchReport, MatcherError, Route, RouteDigest, SegmentSummary, SpeculationStats, StateSet,
};
use crate::{StateId, DEAD};

/// How the per-chunk summaries are stitched together. Composition is
/// associative, so both orders give the same answer; the tree shape
/// exists for reductions distributed over many workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    #[default]
    LeftFold,
    Tree,
}

/// Walks the whole input from the DFA start state. Scanning continues
/// after the walk dies so that an invalid input byte is reported at
/// its first occurrence no matter where the automaton died.
pub fn run_sequential(
    dfa: &Dfa,
    input: &[u8],
    mode: MatchMode,
) -> Result<MatchReport, MatcherError> {
    let mut state = dfa.start();
    let mut hits: u64 = 0;
    let mut pos = 0usize;

    while pos < input.len() {
        let byte = input[pos];
        let Some(col) = dfa.col_of_byte(byte) else {
            return Err(MatcherError::SymbolNotInAlphabet {
                byte,
                position: Some(pos),
            });
        };
        let next = dfa.entry(state, col);
        pos += 1;
        if next == DEAD {
            validate_rest(dfa, input, pos)?;
            return Ok(MatchReport::from_walk(dfa, mode, None, hits));
        }
        state = next;
        hits += dfa.is_final(next) as u64;
    }
    Ok(MatchReport::from_walk(dfa, mode, Some(state), hits))
}

fn validate_rest(dfa: &Dfa, input: &[u8], mut pos: usize) -> Result<(), MatcherError> {
    while pos < input.len() {
        let byte = input[pos];
        if dfa.col_of_byte(byte).is_none() {
            return Err(MatcherError::SymbolNotInAlphabet {
                byte,
                position: Some(pos),
            });
        }
        pos += 1;
    }
    Ok(())
}

struct Chain {
    start: StateId,
    state: StateId,
    hits: u64,
}

struct MergeRecord {
    follower: StateId,
    leader: StateId,
    follower_hits: u64,
    leader_hits: u64,
}

/// Two live chains in the same state at the same position share their
/// entire future, so one of them can stop walking. The record keeps
/// enough to reconstruct the follower's digest from the leader's
/// afterwards.
fn merge_converged(alive: &mut Vec<Chain>, merges: &mut Vec<MergeRecord>) {
    if alive.len() <= 16 {
        let mut i = 1;
        while i < alive.len() {
            match (0..i).find(|&j| alive[j].state == alive[i].state) {
                Some(j) => {
                    merges.push(MergeRecord {
                        follower: alive[i].start,
                        leader: alive[j].start,
                        follower_hits: alive[i].hits,
                        leader_hits: alive[j].hits,
                    });
                    alive.swap_remove(i);
                }
                None => i += 1,
            }
        }
        return;
    }
    let mut order: Vec<usize> = (0..alive.len()).collect();
    order.sort_unstable_by_key(|&i| (alive[i].state, i));
    let mut remove = vec![false; alive.len()];
    let mut group = 0;
    while group < order.len() {
        let mut next = group + 1;
        while next < order.len() && alive[order[next]].state == alive[order[group]].state {
            merges.push(MergeRecord {
                follower: alive[order[next]].start,
                leader: alive[order[group]].start,
                follower_hits: alive[order[next]].hits,
                leader_hits: alive[order[group]].hits,
            });
            remove[order[next]] = true;
            next += 1;
        }
        group = next;
    }
    let mut idx = 0;
    alive.retain(|_| {
        let keep = !remove[idx];
        idx += 1;
        keep
    });
}

/// Walks one route per start state through a chunk and returns the
/// digest of each. The whole chunk is scanned even once every route is
/// dead, so invalid bytes are always detected. Converged chains are
/// merged periodically, which bounds the work at a few live chains per
/// chunk in practice.
pub fn run_chunk(
    dfa: &Dfa,
    chunk: &Chunk<'_>,
    starts: &StateSet,
) -> Result<SegmentSummary, MatcherError> {
    // Checking for convergence is not free, so do it in strides; 64
    // characters keeps the pre-merge overlap negligible against chunk
    // lengths worth parallelizing.
    const MERGE_INTERVAL: usize = 64;

    let text = chunk.text;
    let mut alive: Vec<Chain> = starts
        .iter()
        .map(|&q| Chain {
            start: q,
            state: q,
            hits: 0,
        })
        .collect();
    let mut finished: Vec<(StateId, RouteDigest)> = Vec::new();
    let mut merges: Vec<MergeRecord> = Vec::new();
    let mut k = 0usize;

    'scan: while k < text.len() {
        match alive.len() {
            0 => {
                validate_rest(dfa, text, k).map_err(|e| offset_error(e, chunk.offset))?;
                k = text.len();
            }
            1 => {
                // dominant case once chains have converged: one route,
                // tight loop
                let mut state = alive[0].state;
                let mut hits = alive[0].hits;
                while k < text.len() {
                    let byte = text[k];
                    let Some(col) = dfa.col_of_byte(byte) else {
                        return Err(MatcherError::SymbolNotInAlphabet {
                            byte,
                            position: Some(chunk.offset + k),
                        });
                    };
                    let next = dfa.entry(state, col);
                    k += 1;
                    if next == DEAD {
                        finished.push((
                            alive[0].start,
                            RouteDigest {
                                end: state,
                                hits,
                                dead: true,
                            },
                        ));
                        alive.clear();
                        continue 'scan;
                    }
                    state = next;
                    hits += dfa.is_final(next) as u64;
                }
                alive[0].state = state;
                alive[0].hits = hits;
            }
            _ => {
                let byte = text[k];
                let Some(col) = dfa.col_of_byte(byte) else {
                    return Err(MatcherError::SymbolNotInAlphabet {
                        byte,
                        position: Some(chunk.offset + k),
                    });
                };
                let mut i = 0;
                while i < alive.len() {
                    let next = dfa.entry(alive[i].state, col);
                    if next == DEAD {
                        finished.push((
                            alive[i].start,
                            RouteDigest {
                                end: alive[i].state,
                                hits: alive[i].hits,
                                dead: true,
                            },
                        ));
                        alive.swap_remove(i);
                    } else {
                        alive[i].state = next;
                        alive[i].hits += dfa.is_final(next) as u64;
                        i += 1;
                    }
                }
                k += 1;
                if alive.len() > 1 && k.is_multiple_of(MERGE_INTERVAL) {
                    merge_converged(&mut alive, &mut merges);
                }
            }
        }
    }

    for chain in alive {
        finished.push((
            chain.start,
            RouteDigest {
                end: chain.state,
                hits: chain.hits,
                dead: false,
            },
        ));
    }
    let mut map: BTreeMap<StateId, RouteDigest> = finished.into_iter().collect();
    // A leader may itself have been merged away later in the scan, so
    // resolve newest first: by the time a record is applied its leader
    // already has a final digest.
    for merge in merges.iter().rev() {
        let lead = *map
            .get(&merge.leader)
            .expect("merge leaders always resolve");
        map.insert(
            merge.follower,
            RouteDigest {
                end: lead.end,
                hits: merge.follower_hits + (lead.hits - merge.leader_hits),
                dead: lead.dead,
            },
        );
    }
    Ok(map.into_iter().collect())
}

fn offset_error(e: MatcherError, offset: usize) -> MatcherError {
    match e.position() {
        Some(pos) => e.at(offset + pos),
        None => e,
    }
}

/// Reference implementation of [`run_chunk`]: walks every route
/// independently and records the full visited sequence. Memory is
/// O(routes x chunk length).
pub fn run_chunk_traced(
    dfa: &Dfa,
    chunk: &Chunk<'_>,
    starts: &StateSet,
) -> Result<(SegmentSummary, Vec<Route>), MatcherError> {
    let text = chunk.text;
    let mut cols = Vec::with_capacity(text.len());
    for (k, &byte) in text.iter().enumerate() {
        match dfa.col_of_byte(byte) {
            Some(col) => cols.push(col),
            None => {
                return Err(MatcherError::SymbolNotInAlphabet {
                    byte,
                    position: Some(chunk.offset + k),
                })
            }
        }
    }

    let mut summary = SegmentSummary::new();
    let mut routes = Vec::with_capacity(starts.len());
    for &start in starts {
        let mut visited = Vec::with_capacity(text.len());
        let mut state = start;
        let mut hits = 0u64;
        let mut dead = false;
        for &col in &cols {
            let next = dfa.entry(state, col);
            if next == DEAD {
                dead = true;
                break;
            }
            visited.push(next);
            hits += dfa.is_final(next) as u64;
            state = next;
        }
        summary.insert(
            start,
            RouteDigest {
                end: state,
                hits,
                dead,
            },
        );
        routes.push(Route {
            start,
            visited,
            hits,
            dead,
        });
    }
    Ok((summary, routes))
}

/// What one worker hands back for its chunk.
struct ChunkOutcome {
    stats: ChunkStats,
    summary: SegmentSummary,
    routes_walked: u64,
    trace: Option<ChunkTrace>,
}

/// Start-state candidates for a non-initial chunk. The single
/// boundary character cannot tell chunks with equal boundaries apart,
/// so the candidate set is refined by one further byte of context:
/// the image of the whole state space under the two transitions just
/// before the chunk. The true handover state always lies in that
/// image.
struct Speculation {
    s_len: usize,
    l_len: usize,
    /// Every state the previous chunk can possibly end in, live or
    /// not.
    candidates: StateSet,
    /// `candidates` that survive the chunk's first character; only
    /// these are worth walking.
    starts: StateSet,
}

fn speculate(dfa: &Dfa, input: &[u8], chunk: &Chunk<'_>) -> Result<Speculation, MatcherError> {
    let first = *chunk
        .text
        .first()
        .expect("non-initial chunks are never empty");
    let boundary = chunk
        .boundary_char
        .expect("non-initial chunks have a boundary character");
    let s = compute_s(dfa, first).map_err(|e| e.at(chunk.offset))?;
    let l = compute_l(dfa, boundary).map_err(|e| e.at(chunk.offset - 1))?;
    let candidates = if chunk.offset >= 2 {
        let two_back = input[chunk.offset - 2];
        let reached = compute_l(dfa, two_back).map_err(|e| e.at(chunk.offset - 2))?;
        let col = dfa
            .col_of_byte(boundary)
            .expect("boundary column checked by compute_l above");
        let image: StateSet = reached
            .iter()
            .map(|&q| dfa.entry(q, col))
            .filter(|&dest| dest != DEAD)
            .collect();
        debug_assert!(image.is_subset(&l));
        image
    } else {
        l.clone()
    };
    let starts = candidates.intersection(&s).copied().collect();
    Ok(Speculation {
        s_len: s.len(),
        l_len: l.len(),
        candidates,
        starts,
    })
}

fn execute_chunk(
    dfa: &Dfa,
    input: &[u8],
    chunk: &Chunk<'_>,
    all_states: bool,
    trace: bool,
) -> Result<ChunkOutcome, MatcherError> {
    let (stats, candidates, starts) = if chunk.index == 0 {
        let start = StateSet::from([dfa.start()]);
        (
            ChunkStats {
                s_len: 0,
                l_len: 0,
                r_len: 1,
            },
            start.clone(),
            start,
        )
    } else {
        let spec = speculate(dfa, input, chunk)?;
        let stats = ChunkStats {
            s_len: spec.s_len,
            l_len: spec.l_len,
            r_len: spec.starts.len(),
        };
        if all_states {
            let all: StateSet = (0..dfa.state_count() as StateId).collect();
            (stats, all.clone(), all)
        } else {
            (stats, spec.candidates, spec.starts)
        }
    };

    let (mut summary, routes) = if trace {
        run_chunk_traced(dfa, chunk, &starts)?
    } else {
        (run_chunk(dfa, chunk, &starts)?, Vec::new())
    };
    // Candidates that cannot take the chunk's first character die on
    // the spot. They are not walked, but composition still needs their
    // digests: the previous chunk may legitimately end in one of them.
    for &q in candidates.difference(&starts) {
        summary.insert(
            q,
            RouteDigest {
                end: q,
                hits: 0,
                dead: true,
            },
        );
    }

    Ok(ChunkOutcome {
        stats,
        summary,
        routes_walked: starts.len() as u64,
        trace: trace.then_some(ChunkTrace {
            index: chunk.index,
            starts,
            routes,
        }),
    })
}

fn fold_reduce(summaries: Vec<SegmentSummary>) -> Result<SegmentSummary, MatcherError> {
    let mut iter = summaries.into_iter();
    let mut acc = iter.next().expect("at least one chunk");
    for summary in iter {
        acc = compose_summaries(&acc, &summary)?;
    }
    Ok(acc)
}

fn tree_reduce(summaries: Vec<SegmentSummary>) -> Result<SegmentSummary, MatcherError> {
    let mut layer = summaries;
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len().div_ceil(2));
        let mut iter = layer.into_iter();
        while let Some(left) = iter.next() {
            match iter.next() {
                Some(right) => next.push(compose_summaries(&left, &right)?),
                None => next.push(left),
            }
        }
        layer = next;
    }
    Ok(layer.into_iter().next().expect("at least one chunk"))
}

fn run_chunked(
    dfa: &Dfa,
    input: &[u8],
    p: usize,
    mode: MatchMode,
    all_states: bool,
    reduction: Reduction,
    trace: bool,
) -> Result<(MatchReport, SpeculationStats, Vec<ChunkTrace>), MatcherError> {
    let chunks = chunk_input(input, p);

    let outcomes: Vec<Result<ChunkOutcome, MatcherError>> = if chunks.len() == 1 {
        vec![execute_chunk(dfa, input, &chunks[0], all_states, trace)]
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| {
                    scope.spawn(move || execute_chunk(dfa, input, chunk, all_states, trace))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };

    // Workers validate disjoint parts of the input (the two bytes of
    // speculation lookback lie in earlier chunks and are validated
    // there too), so the earliest reported position is the first
    // invalid byte of the whole input, same as the sequential walk.
    let mut results = Vec::with_capacity(outcomes.len());
    let mut first_error: Option<MatcherError> = None;
    for outcome in outcomes {
        match outcome {
            Ok(res) => results.push(res),
            Err(e) => {
                let earlier = match &first_error {
                    Some(prev) => e.position() < prev.position(),
                    None => true,
                };
                if earlier {
                    first_error = Some(e);
                }
            }
        }
    }
    if let Some(e) = first_error {
        return Err(e);
    }

    let state_count = dfa.state_count() as u64;
    let chunk_count = results.len() as u64;
    let stats = SpeculationStats {
        chunks: results.iter().map(|r| r.stats).collect(),
        routes_executed: results.iter().map(|r| r.routes_walked).sum(),
        total_routes_parem: results.iter().map(|r| r.stats.r_len as u64).sum(),
        total_routes_enum: (chunk_count - 1) * state_count + 1,
    };
    let traces: Vec<ChunkTrace> = results.iter_mut().filter_map(|r| r.trace.take()).collect();

    let summaries: Vec<SegmentSummary> = results.into_iter().map(|r| r.summary).collect();
    let total = match reduction {
        Reduction::LeftFold => fold_reduce(summaries)?,
        Reduction::Tree => tree_reduce(summaries)?,
    };
    // Chunk 0 walks exactly one route from the start state, so the
    // composed summary always has this entry.
    let digest = total
        .get(dfa.start())
        .ok_or(MatcherError::MissingRoute { state: dfa.start() })?;
    let end = if digest.dead { None } else { Some(digest.end) };
    let report = MatchReport::from_walk(dfa, mode, end, digest.hits);
    Ok((report, stats, traces))
}

/// Speculative parallel matching over `p` chunks with one worker
/// thread per chunk, left-fold reduction.
pub fn run_parem(
    dfa: &Dfa,
    input: &[u8],
    p: usize,
    mode: MatchMode,
) -> Result<(MatchReport, SpeculationStats), MatcherError> {
    run_parem_with(dfa, input, p, mode, Reduction::LeftFold)
}

/// [`run_parem`] with an explicit reduction shape.
pub fn run_parem_with(
    dfa: &Dfa,
    input: &[u8],
    p: usize,
    mode: MatchMode,
    reduction: Reduction,
) -> Result<(MatchReport, SpeculationStats), MatcherError> {
    run_chunked(dfa, input, p, mode, false, reduction, false)
        .map(|(report, stats, _)| (report, stats))
}

/// [`run_parem`] keeping the full route of every speculative walk.
/// Memory is proportional to the input; meant for tests and
/// diagnostics.
pub fn run_parem_traced(
    dfa: &Dfa,
    input: &[u8],
    p: usize,
    mode: MatchMode,
) -> Result<(MatchReport, SpeculationStats, Vec<ChunkTrace>), MatcherError> {
    run_chunked(dfa, input, p, mode, false, Reduction::LeftFold, true)
}

/// Enumerative parallel matching: every non-initial chunk walks a
/// route from all states. The returned stats carry the speculative
/// set sizes too, so the strategies can be compared from either run.
pub fn run_enum(
    dfa: &Dfa,
    input: &[u8],
    p: usize,
    mode: MatchMode,
) -> Result<(MatchReport, SpeculationStats), MatcherError> {
    run_chunked(dfa, input, p, mode, true, Reduction::LeftFold, false)
        .map(|(report, stats, _)| (report, stats))
}
