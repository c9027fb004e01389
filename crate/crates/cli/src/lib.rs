//! Library half of the `spatial-decay` command-line tool: CSV ingestion,
//! report rendering, synthetic fixture generators, and the parallel study
//! runner. The binary in `main.rs` is a thin clap dispatcher over
//! [`commands`].

pub mod commands;
pub mod csvio;
pub mod error;
pub mod fixtures;
pub mod report;
pub mod runner;

pub use error::CliError;
