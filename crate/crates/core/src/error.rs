use std::io;

use thiserror::Error;

/// Errors produced by the solver and its file formats.
#[derive(Debug, Error)]
pub enum QaeError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("embedding error: {0}")]
    Embedding(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl QaeError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        QaeError::Parse {
            line,
            message: message.into(),
        }
    }

    /// Input/validation problems as opposed to failures during a computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            QaeError::Parse { .. }
                | QaeError::Validation(_)
                | QaeError::Parameter(_)
                | QaeError::DimensionMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, QaeError>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(QaeError::DimensionMismatch { expected, found })
    }
}
