//! Command implementations and the error-to-exit-code mapping.

use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use parem_core::{
    build_search_dfa, compile_regex, export_dfa_table, export_dot, load_dfa_table, run_enum,
    run_parem, run_sequential, CompileError, Dfa, MatchMode, MatchReport, MatcherError,
    DEFAULT_STATE_CAP,
};

use crate::args::{BenchArgs, CompileArgs, DfaSource, GenArgs, MatchArgs};
use crate::bench::{rows_to_csv, run_bench, BenchConfig, BenchError, Engine};
use crate::gen::{gen_input, GenError};

pub const ENV_MAX_DFA_STATES: &str = "PAREM_MAX_DFA_STATES";

/// Failure categories, each with its process exit code: 1 for I/O,
/// 2 for anything wrong with the user's inputs, 3 for internal
/// invariant breaches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Io(String),
    Validation(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(msg) | CliError::Validation(msg) | CliError::Internal(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<parem_core::AutomataError> for CliError {
    fn from(e: parem_core::AutomataError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<MatcherError> for CliError {
    fn from(e: MatcherError) -> Self {
        match e {
            MatcherError::SymbolNotInAlphabet { .. } => CliError::Validation(e.to_string()),
            MatcherError::MissingRoute { .. } => CliError::Internal(e.to_string()),
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Config(_) | BenchError::Gen(_) => CliError::Validation(e.to_string()),
            BenchError::Matcher(inner) => inner.into(),
            BenchError::ResultMismatch { .. } | BenchError::NonDeterministic { .. } => {
                CliError::Internal(e.to_string())
            }
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn require_ascii(what: &str, text: &str) -> Result<(), CliError> {
    if text.is_ascii() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{what} must be ASCII, got {text:?}"
        )))
    }
}

/// State cap: flag, then the environment, then the default.
fn resolve_cap(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var(ENV_MAX_DFA_STATES) {
        Ok(text) => text.parse().map_err(|_| {
            CliError::Validation(format!("{ENV_MAX_DFA_STATES} is not a number: {text:?}"))
        }),
        Err(_) => Ok(DEFAULT_STATE_CAP),
    }
}

/// Builds the DFA from whichever source the user picked.
/// `allow_file` is off for `compile`, which only creates tables.
fn resolve_dfa(source: &DfaSource, cap: usize, allow_file: bool) -> Result<Dfa, CliError> {
    let picked = [
        source.dfa.is_some(),
        source.regex.is_some(),
        source.literal.is_some(),
    ]
    .iter()
    .filter(|&&p| p)
    .count();
    let expected = if allow_file {
        "--dfa, --regex or --literal"
    } else {
        "--regex or --literal"
    };
    if picked != 1 || (!allow_file && source.dfa.is_some()) {
        return Err(CliError::Validation(format!(
            "give exactly one of {expected}"
        )));
    }
    if source.alphabet.is_some() && source.literal.is_none() {
        return Err(CliError::Validation(
            "--alphabet only applies to --literal".into(),
        ));
    }
    if let Some(path) = &source.dfa {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        return Ok(load_dfa_table(&text)?);
    }
    if let Some(pattern) = &source.regex {
        require_ascii("pattern", pattern)?;
        return Ok(compile_regex(pattern, cap)?);
    }
    let literal = source.literal.as_ref().expect("picked == 1");
    let alphabet = source
        .alphabet
        .as_ref()
        .ok_or_else(|| CliError::Validation("--literal requires --alphabet".into()))?;
    require_ascii("literal", literal)?;
    require_ascii("alphabet", alphabet)?;
    Ok(build_search_dfa(literal, alphabet)?)
}

pub fn cmd_compile(args: &CompileArgs) -> Result<(), CliError> {
    let cap = resolve_cap(args.max_dfa_states)?;
    let dfa = resolve_dfa(&args.source, cap, false)?;
    if args.dot && args.out.is_none() {
        return Err(CliError::Validation(
            "--dot needs --out to name the file".into(),
        ));
    }
    if let Some(out) = &args.out {
        fs::write(out, export_dfa_table(&dfa)).map_err(|e| io_error(out, e))?;
        if args.dot {
            let dot_path = out.with_extension("dot");
            fs::write(&dot_path, export_dot(&dfa)).map_err(|e| io_error(&dot_path, e))?;
        }
    }
    println!("states: {}", dfa.state_count());
    println!("alphabet: {}", dfa.alphabet().iter().collect::<String>());
    println!("complete: {}", dfa.is_complete());
    Ok(())
}

pub fn cmd_match(args: &MatchArgs) -> Result<(), CliError> {
    let cap = resolve_cap(args.max_dfa_states)?;
    let dfa = resolve_dfa(&args.source, cap, true)?;
    let input = fs::read(&args.input).map_err(|e| io_error(&args.input, e))?;
    let threads = match args.threads {
        Some(0) => return Err(CliError::Validation("--threads must be positive".into())),
        Some(t) => t,
        None => std::thread::available_parallelism()
            .map(usize::from)
            .unwrap_or(1),
    };
    let mode: MatchMode = args.mode.into();

    let started = Instant::now();
    let (report, routes): (MatchReport, u64) = match args.engine {
        Engine::Seq => (run_sequential(&dfa, &input, mode)?, 1),
        Engine::Parem => {
            let (report, stats) = run_parem(&dfa, &input, threads, mode)?;
            (report, stats.routes_executed)
        }
        Engine::Enum => {
            let (report, stats) = run_enum(&dfa, &input, threads, mode)?;
            (report, stats.routes_executed)
        }
    };
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;

    match mode {
        MatchMode::Accept => println!("accepted: {}", report.accepted),
        MatchMode::Count => println!("count: {}", report.count),
    }
    match report.end_state {
        Some(state) => println!("end_state: {state}"),
        None => println!("end_state: none"),
    }
    println!("routes: {routes}");
    println!("time_ms: {elapsed_ms:.3}");
    Ok(())
}

pub fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    require_ascii("alphabet", &args.alphabet)?;
    if let Some(plant) = &args.plant {
        require_ascii("plant literal", plant)?;
    }
    let alphabet_bytes = args.alphabet.as_bytes();
    for (i, b) in alphabet_bytes.iter().enumerate() {
        if alphabet_bytes[..i].contains(b) {
            return Err(CliError::Validation(format!(
                "duplicate alphabet character {:?}",
                *b as char
            )));
        }
    }
    let plant = args
        .plant
        .as_ref()
        .map(|lit| (lit.as_bytes(), args.occurrences));
    let data = gen_input(args.length, alphabet_bytes, args.seed, plant)?;
    fs::write(&args.out, &data).map_err(|e| io_error(&args.out, e))?;
    println!("wrote {} bytes to {}", data.len(), args.out.display());
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let cap = resolve_cap(args.max_dfa_states)?;
    let dfa = resolve_dfa(&args.source, cap, true)?;
    if let Some(plant) = &args.plant {
        require_ascii("plant literal", plant)?;
    }
    let config = BenchConfig {
        engines: args.engines.clone(),
        threads: args.threads.clone(),
        lengths: args.lengths.clone(),
        repetitions: args.reps,
        seed: args.seed,
        mode: args.mode.into(),
        plant: args
            .plant
            .as_ref()
            .map(|lit| (lit.as_bytes().to_vec(), args.occurrences)),
    };
    let mut progress = |row: &crate::bench::BenchRow| {
        eprintln!(
            "bench: engine={} threads={} length={} mean_ms={:.3} speedup={:.2}",
            row.engine, row.threads, row.input_length, row.mean_ms, row.speedup_vs_seq
        );
    };
    let rows = run_bench(&dfa, &config, Some(&mut progress))?;
    let csv = rows_to_csv(&rows);
    match &args.out {
        Some(path) => fs::write(path, csv).map_err(|e| io_error(path, e))?,
        None => print!("{csv}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn source(
        dfa: Option<&str>,
        regex: Option<&str>,
        literal: Option<&str>,
        alphabet: Option<&str>,
    ) -> DfaSource {
        DfaSource {
            dfa: dfa.map(Into::into),
            regex: regex.map(String::from),
            literal: literal.map(String::from),
            alphabet: alphabet.map(String::from),
        }
    }

    #[test]
    fn resolve_dfa_wants_exactly_one_source() {
        let err = resolve_dfa(&source(None, None, None, None), 100, true).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err =
            resolve_dfa(&source(None, Some("a"), Some("b"), Some("ab")), 100, true).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        // compile does not take --dfa
        let err = resolve_dfa(&source(Some("x.dfa"), None, None, None), 100, false).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn resolve_dfa_compiles_both_pattern_kinds() {
        let from_regex = resolve_dfa(&source(None, Some("ab*"), None, None), 100, true).unwrap();
        assert!(from_regex.state_count() >= 2);
        let from_literal = resolve_dfa(
            &source(None, None, Some("parallel"), Some("parel")),
            100,
            true,
        )
        .unwrap();
        assert_eq!(from_literal.state_count(), 9);
    }

    #[test]
    fn resolve_dfa_propagates_validation_errors() {
        let err = resolve_dfa(&source(None, Some("(a"), None, None), 100, true).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = resolve_dfa(&source(None, None, Some("ab"), None), 100, true).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = resolve_dfa(&source(None, Some("ピ"), None, None), 100, true).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_table_file_is_an_io_error() {
        let err = resolve_dfa(
            &source(Some("/nonexistent/x.dfa"), None, None, None),
            100,
            true,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn state_cap_resolution_order() {
        // flag wins over everything; the env var is read only when the
        // flag is absent. Env-var reads are process-global, so set it
        // once here rather than in parallel tests.
        std::env::set_var(ENV_MAX_DFA_STATES, "7");
        assert_eq!(resolve_cap(Some(3)).unwrap(), 3);
        assert_eq!(resolve_cap(None).unwrap(), 7);
        std::env::set_var(ENV_MAX_DFA_STATES, "not a number");
        assert!(resolve_cap(None).is_err());
        std::env::remove_var(ENV_MAX_DFA_STATES);
        assert_eq!(resolve_cap(None).unwrap(), DEFAULT_STATE_CAP);
    }

    #[test]
    fn error_exit_codes() {
        assert_eq!(CliError::Io("x".into()).exit_code(), 1);
        assert_eq!(CliError::Validation("x".into()).exit_code(), 2);
        assert_eq!(CliError::Internal("x".into()).exit_code(), 3);
        let mismatch: CliError = BenchError::ResultMismatch {
            engine: Engine::Parem,
            threads: 2,
            length: 10,
            expected: 1,
            got: 2,
        }
        .into();
        assert_eq!(mismatch.exit_code(), 3);
    }
}
