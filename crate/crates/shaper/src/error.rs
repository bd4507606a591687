use std::path::PathBuf;

use shaper_core::Error as ModelError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } | Self::Input(_) | Self::Io { .. } => 1,
            Self::Infeasible(_) => 2,
            Self::Validation(_) => 3,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io { context: context.into(), source }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Infeasible(_) | ModelError::MacroInfeasible { .. } => Self::Infeasible(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}
