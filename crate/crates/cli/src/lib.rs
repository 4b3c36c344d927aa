//! Library surface of the `idiom-forge` command-line tool, kept separate from
//! the binary so the commands and metrics are testable in-process.

pub mod commands;
pub mod eval;

pub use commands::{run, Cli};
