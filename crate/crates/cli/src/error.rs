use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid config: {0}")]
    Validation(String),
    #[error("invalid config: mode count {modes} along axis {axis} is odd (OddModeCount)")]
    OddModeCount { axis: usize, modes: usize },
    #[error("invalid config: s = {0} does not exceed the 5/6 threshold (SubThreshold)")]
    SubThreshold(String),
    #[error(transparent)]
    Core(#[from] wgnls::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Parse { .. }
            | CliError::Validation(_)
            | CliError::OddModeCount { .. }
            | CliError::SubThreshold(_) => 2,
            CliError::Core(e) => match e {
                wgnls::Error::BoundaryMassExceeded { .. } => 3,
                wgnls::Error::NonFinite { .. } => 4,
                wgnls::Error::UnderResolved { .. } => 5,
                wgnls::Error::OddModeCount { .. } | wgnls::Error::SubThreshold { .. } => 2,
                _ => 6,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
