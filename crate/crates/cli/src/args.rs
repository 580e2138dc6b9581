//! Command-line surface. Kept separate from the command
//! implementations so tests can build argument structs directly.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::Engine;
use parem_core::MatchMode;

/// Scientific notation is accepted for lengths (`1e8`, `6.69e7`), as
/// are underscores (`100_000`).
pub fn parse_length(text: &str) -> Result<usize, String> {
    let cleaned = text.replace('_', "");
    if let Ok(n) = cleaned.parse::<usize>() {
        return Ok(n);
    }
    let value: f64 = cleaned
        .parse()
        .map_err(|_| format!("not a length: {text:?}"))?;
    if !value.is_finite() || value < 0.0 || value.fract() != 0.0 || value > u64::MAX as f64 {
        return Err(format!("not a whole non-negative length: {text:?}"));
    }
    Ok(value as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Accept,
    Count,
}

impl From<ModeArg> for MatchMode {
    fn from(mode: ModeArg) -> MatchMode {
        match mode {
            ModeArg::Accept => MatchMode::Accept,
            ModeArg::Count => MatchMode::Count,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "parem",
    version,
    about = "Compile patterns to DFAs and match them sequentially or in parallel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a regex or a search literal into a DFA table file
    Compile(CompileArgs),
    /// Run a DFA over an input file
    Match(MatchArgs),
    /// Generate a reproducible random input file
    Gen(GenArgs),
    /// Time the engines over thread counts and input lengths, as CSV
    Bench(BenchArgs),
}

/// Where the DFA comes from: a compiled table file, a regex, or a
/// search literal with its alphabet. Exactly one source.
#[derive(Debug, Clone, Default, Args)]
pub struct DfaSource {
    /// Compiled transition-table file
    #[arg(long)]
    pub dfa: Option<PathBuf>,
    /// Pattern in the regex language (see README)
    #[arg(long)]
    pub regex: Option<String>,
    /// Literal whose occurrences to search for (requires --alphabet)
    #[arg(long)]
    pub literal: Option<String>,
    /// Input alphabet for --literal, one character per symbol
    #[arg(long)]
    pub alphabet: Option<String>,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[command(flatten)]
    pub source: DfaSource,
    /// Write the transition table here
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Also write a GraphViz rendering next to --out
    #[arg(long)]
    pub dot: bool,
    /// Subset-construction state cap [env: PAREM_MAX_DFA_STATES]
    #[arg(long)]
    pub max_dfa_states: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[command(flatten)]
    pub source: DfaSource,
    /// File to match
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Engine::Parem)]
    pub engine: Engine,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Count)]
    pub mode: ModeArg,
    /// Subset-construction state cap [env: PAREM_MAX_DFA_STATES]
    #[arg(long)]
    pub max_dfa_states: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Bytes to generate (scientific notation accepted)
    #[arg(value_parser = parse_length)]
    pub length: usize,
    /// Characters to draw from, one byte per symbol
    #[arg(long)]
    pub alphabet: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Literal to plant into the input
    #[arg(long)]
    pub plant: Option<String>,
    /// Copies of --plant to place
    #[arg(long, default_value_t = 1)]
    pub occurrences: usize,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub source: DfaSource,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "seq,parem,enum"
    )]
    pub engines: Vec<Engine>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    pub threads: Vec<usize>,
    /// Input lengths (scientific notation accepted)
    #[arg(long, value_delimiter = ',', value_parser = parse_length, default_value = "1e7")]
    pub lengths: Vec<usize>,
    /// Timed repetitions per combination, after one warm-up
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Count)]
    pub mode: ModeArg,
    /// Literal to plant into the generated inputs
    #[arg(long)]
    pub plant: Option<String>,
    /// Copies of --plant to place
    #[arg(long, default_value_t = 1)]
    pub occurrences: usize,
    /// Write the CSV here instead of standard output
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Subset-construction state cap [env: PAREM_MAX_DFA_STATES]
    #[arg(long)]
    pub max_dfa_states: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths_parse_plain_scientific_and_underscored() {
        assert_eq!(parse_length("1000"), Ok(1000));
        assert_eq!(parse_length("1e8"), Ok(100_000_000));
        assert_eq!(parse_length("6.69e7"), Ok(66_900_000));
        assert_eq!(parse_length("100_000"), Ok(100_000));
        assert!(parse_length("1.5").is_err());
        assert!(parse_length("-3").is_err());
        assert!(parse_length("abc").is_err());
    }

    #[test]
    fn cli_parses_the_documented_invocations() {
        use clap::Parser;
        Cli::try_parse_from([
            "parem",
            "compile",
            "--regex",
            "(a|b)?c*[0..3]b+",
            "-o",
            "pattern.dfa",
            "--dot",
        ])
        .unwrap();
        Cli::try_parse_from([
            "parem",
            "match",
            "--dfa",
            "pattern.dfa",
            "--input",
            "big.txt",
            "--engine",
            "parem",
            "--threads",
            "8",
            "--mode",
            "count",
        ])
        .unwrap();
        Cli::try_parse_from([
            "parem",
            "gen",
            "1e8",
            "--alphabet",
            "parel",
            "--seed",
            "42",
            "--out",
            "big.txt",
        ])
        .unwrap();
        Cli::try_parse_from([
            "parem",
            "bench",
            "--dfa",
            "pattern.dfa",
            "--engines",
            "seq,parem,enum",
            "--threads",
            "1,2,4,8",
            "--lengths",
            "1e6,1e7,1e8",
            "--reps",
            "20",
            "--out",
            "results.csv",
        ])
        .unwrap();
    }
}
