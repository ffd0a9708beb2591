//! Batch orchestration behind the `analyze` binary.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

pub use commands::{cmd_correlate, cmd_criticality, cmd_efficiency, cmd_robustness, cmd_volumes, run, Outcome};
pub use config::{CommandName, Format, RunConfig};
pub use output::{write_artifacts, Artifact};

/// Exit code for bad arguments.
pub const EXIT_USAGE: i32 = 1;
/// Exit code for unreadable or invalid data.
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        }
    }
}
