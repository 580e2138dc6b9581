//! Timed engine comparisons.
//!
//! For every requested input length a sequential baseline is measured
//! first (whether or not `seq` is among the requested engines); it
//! provides the denominator for `speedup_vs_seq` and the reference
//! match count every other engine/thread combination must reproduce.
//! Each combination runs one discarded warm-up plus `repetitions`
//! timed repetitions.

use std::fmt;
use std::time::Instant;

use parem_core::{run_enum, run_parem, run_sequential, Dfa, MatchMode, MatchReport, MatcherError};

use crate::gen::{gen_input, GenError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Engine {
    Seq,
    Parem,
    Enum,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Seq => "seq",
            Engine::Parem => "parem",
            Engine::Enum => "enum",
        })
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub engines: Vec<Engine>,
    pub threads: Vec<usize>,
    pub lengths: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub mode: MatchMode,
    /// Literal to plant into the generated input, with a copy count.
    pub plant: Option<(Vec<u8>, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub engine: Engine,
    pub threads: usize,
    pub input_length: usize,
    pub mean_ms: f64,
    pub stddev_ms: f64,
    pub min_ms: f64,
    pub speedup_vs_seq: f64,
    pub routes_total: u64,
    pub match_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BenchError {
    Config(String),
    Gen(GenError),
    Matcher(MatcherError),
    /// An engine disagreed with the sequential baseline. This aborts
    /// the whole benchmark: timing a wrong answer is meaningless.
    ResultMismatch {
        engine: Engine,
        threads: usize,
        length: usize,
        expected: u64,
        got: u64,
    },
    /// The same engine produced different results across repetitions.
    NonDeterministic {
        engine: Engine,
        threads: usize,
        length: usize,
    },
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchError::Config(msg) => write!(f, "{msg}"),
            BenchError::Gen(e) => write!(f, "{e}"),
            BenchError::Matcher(e) => write!(f, "{e}"),
            BenchError::ResultMismatch {
                engine,
                threads,
                length,
                expected,
                got,
            } => write!(
                f,
                "{engine} with {threads} threads on length {length} counted {got}, \
                 sequential baseline counted {expected}"
            ),
            BenchError::NonDeterministic {
                engine,
                threads,
                length,
            } => write!(
                f,
                "{engine} with {threads} threads on length {length} was not reproducible \
                 across repetitions"
            ),
        }
    }
}

impl std::error::Error for BenchError {}

impl From<GenError> for BenchError {
    fn from(e: GenError) -> Self {
        BenchError::Gen(e)
    }
}

impl From<MatcherError> for BenchError {
    fn from(e: MatcherError) -> Self {
        BenchError::Matcher(e)
    }
}

pub const CSV_HEADER: &str =
    "engine,threads,input_length,mean_ms,stddev_ms,min_ms,speedup_vs_seq,routes_total,match_count";

#[derive(Debug, Clone)]
struct Sample {
    times_ms: Vec<f64>,
    match_count: u64,
    routes_total: u64,
}

impl Sample {
    fn mean(&self) -> f64 {
        self.times_ms.iter().sum::<f64>() / self.times_ms.len() as f64
    }

    fn stddev(&self) -> f64 {
        if self.times_ms.len() < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let var = self
            .times_ms
            .iter()
            .map(|t| (t - mean) * (t - mean))
            .sum::<f64>()
            / (self.times_ms.len() - 1) as f64;
        var.sqrt()
    }

    fn min(&self) -> f64 {
        self.times_ms.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn match_count_of(report: &MatchReport, mode: MatchMode) -> u64 {
    match mode {
        MatchMode::Count => report.count,
        MatchMode::Accept => report.accepted as u64,
    }
}

fn measure(
    dfa: &Dfa,
    input: &[u8],
    engine: Engine,
    threads: usize,
    mode: MatchMode,
    repetitions: usize,
    length: usize,
) -> Result<Sample, BenchError> {
    let mut times_ms = Vec::with_capacity(repetitions);
    let mut outcome: Option<(u64, u64)> = None;
    // repetition 0 is the discarded warm-up
    for rep in 0..=repetitions {
        let started = Instant::now();
        let (count, routes) = match engine {
            Engine::Seq => {
                let report = run_sequential(dfa, input, mode)?;
                (match_count_of(&report, mode), 1)
            }
            Engine::Parem => {
                let (report, stats) = run_parem(dfa, input, threads, mode)?;
                (match_count_of(&report, mode), stats.routes_executed)
            }
            Engine::Enum => {
                let (report, stats) = run_enum(dfa, input, threads, mode)?;
                (match_count_of(&report, mode), stats.routes_executed)
            }
        };
        let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
        match outcome {
            None => outcome = Some((count, routes)),
            Some(expected) if expected != (count, routes) => {
                return Err(BenchError::NonDeterministic {
                    engine,
                    threads,
                    length,
                });
            }
            Some(_) => {}
        }
        if rep > 0 {
            times_ms.push(elapsed_ms);
        }
    }
    let (match_count, routes_total) = outcome.expect("at least the warm-up ran");
    Ok(Sample {
        times_ms,
        match_count,
        routes_total,
    })
}

/// Runs the whole benchmark matrix. Row order is length-major, then
/// engine, then thread count. `progress` (when given) is invoked with
/// each finished row, for live reporting on long runs.
pub fn run_bench(
    dfa: &Dfa,
    config: &BenchConfig,
    mut progress: Option<&mut dyn FnMut(&BenchRow)>,
) -> Result<Vec<BenchRow>, BenchError> {
    if config.engines.is_empty() {
        return Err(BenchError::Config("no engines requested".into()));
    }
    if config.threads.is_empty() || config.threads.contains(&0) {
        return Err(BenchError::Config("thread counts must be positive".into()));
    }
    if config.lengths.is_empty() {
        return Err(BenchError::Config("no input lengths requested".into()));
    }
    if config.repetitions == 0 {
        return Err(BenchError::Config("need at least one repetition".into()));
    }
    let alphabet: Vec<u8> = config
        .dfa_alphabet_bytes(dfa)
        .ok_or_else(|| BenchError::Config("alphabet has non-byte symbols".into()))?;

    let base_threads = *config.threads.iter().min().expect("non-empty");
    let mut rows = Vec::new();
    for &length in &config.lengths {
        let plant = config
            .plant
            .as_ref()
            .map(|(lit, occ)| (lit.as_slice(), *occ));
        let input = gen_input(length, &alphabet, config.seed, plant)?;

        let baseline = measure(
            dfa,
            &input,
            Engine::Seq,
            base_threads,
            config.mode,
            config.repetitions,
            length,
        )?;
        let baseline_mean = baseline.mean();
        let expected_count = baseline.match_count;

        for &engine in &config.engines {
            for &threads in &config.threads {
                let sample = if engine == Engine::Seq && threads == base_threads {
                    baseline.clone()
                } else {
                    measure(
                        dfa,
                        &input,
                        engine,
                        threads,
                        config.mode,
                        config.repetitions,
                        length,
                    )?
                };
                if sample.match_count != expected_count {
                    return Err(BenchError::ResultMismatch {
                        engine,
                        threads,
                        length,
                        expected: expected_count,
                        got: sample.match_count,
                    });
                }
                let mean_ms = sample.mean();
                let row = BenchRow {
                    engine,
                    threads,
                    input_length: length,
                    mean_ms,
                    stddev_ms: sample.stddev(),
                    min_ms: sample.min(),
                    speedup_vs_seq: if engine == Engine::Seq {
                        1.0
                    } else {
                        baseline_mean / mean_ms
                    },
                    routes_total: sample.routes_total,
                    match_count: sample.match_count,
                };
                if let Some(callback) = progress.as_deref_mut() {
                    callback(&row);
                }
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

impl BenchConfig {
    fn dfa_alphabet_bytes(&self, dfa: &Dfa) -> Option<Vec<u8>> {
        dfa.alphabet()
            .iter()
            .map(|&c| u8::try_from(c as u32).ok())
            .collect()
    }
}

/// Renders rows as CSV under [`CSV_HEADER`].
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6},{:.6},{:.4},{},{}\n",
            row.engine,
            row.threads,
            row.input_length,
            row.mean_ms,
            row.stddev_ms,
            row.min_ms,
            row.speedup_vs_seq,
            row.routes_total,
            row.match_count
        ));
    }
    out
}
