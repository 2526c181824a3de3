//! Library side of the `ulam` command: argument definitions, the results
//! cache, verification suites and table filling.

pub mod cache;
pub mod commands;
pub mod suites;
pub mod table;

pub use commands::{error_exit, run, Cli, Exit};
