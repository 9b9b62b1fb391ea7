use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum OusError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid probability {value} at index {index}: must lie in (0, 1]")]
    InvalidProbability { index: usize, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A policy was driven out of order or past a terminal state.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
}

pub type Result<T, E = OusError> = std::result::Result<T, E>;

impl OusError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        OusError::Io {
            path: path.into(),
            source,
        }
    }
}
