use std::fmt;

use hotqubit::Error as ModelError;

/// Failure classes mapped to process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration, unreadable or malformed input files.
    #[error("input error: {0}")]
    Input(String),
    /// The model or a fit could not produce a usable result.
    #[error("model error: {0}")]
    Model(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn input(msg: impl fmt::Display) -> Self {
        CliError::Input(msg.to_string())
    }

    pub fn model(msg: impl fmt::Display) -> Self {
        CliError::Model(msg.to_string())
    }

    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 1,
            CliError::Model(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Domain { .. }
            | ModelError::InsufficientData { .. }
            | ModelError::Invalid(_) => CliError::Input(e.to_string()),
            ModelError::LowVisibility { .. } | ModelError::OutOfRange { .. } => {
                CliError::Model(e.to_string())
            }
            ModelError::Numerical { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Numerical(format!("serialization: {e}"))
    }
}
