use clap::Parser;

use parem_cli::args::{Cli, Command};
use parem_cli::commands::{cmd_bench, cmd_compile, cmd_gen, cmd_match};

/// Rust masks SIGPIPE, which turns writes into a closed pipe
/// (`parem match ... | head`) into panics. Restore the default
/// disposition so the process ends quietly like any other filter.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() {
    reset_sigpipe();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compile(args) => cmd_compile(args),
        Command::Match(args) => cmd_match(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
