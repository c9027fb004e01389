//! Error classes with stable process exit codes.
//!
//! | class       | code | meaning                                        |
//! |-------------|------|------------------------------------------------|
//! | success     | 0    |                                                |
//! | `Io`        | 1    | file system failures                           |
//! | `Config`    | 2    | invalid flags, schemas, or input values        |
//! | `Parse`     | 3    | malformed CSV content, reported with its line  |
//! | `Numeric`   | 4    | an estimation routine failed on valid input    |
//!
//! clap's own usage errors also exit with code 2.

use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Config(String),
    #[error("parse error in {path}, line {line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Parse { .. } => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}
