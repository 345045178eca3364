//! CLI error classification: validation failures exit 1, I/O failures
//! exit 2.

use std::path::Path;

use perfport_core::{LaneError, MetricsError, OptimizerError, ScanError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError::Validation(message.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io(format!("{}: {source}", path.display()))
    }
}

impl From<ScanError> for CliError {
    fn from(err: ScanError) -> Self {
        match err {
            ScanError::Io { .. } => CliError::Io(err.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(err: MetricsError) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<OptimizerError> for CliError {
    fn from(err: OptimizerError) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<LaneError> for CliError {
    fn from(err: LaneError) -> Self {
        CliError::Validation(err.to_string())
    }
}
