//! Command-line front end: pattern compilation, matching, input
//! generation and benchmarking. The binary in `main.rs` is a thin
//! dispatcher over [`commands`]; everything else lives here so the
//! test suites can drive it in-process.

pub mod args;
pub mod bench;
pub mod commands;
pub mod gen;
