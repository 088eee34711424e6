use std::fmt;

use thiserror::Error;

/// Which half of the iterate a failure refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    X,
    Y,
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::X => f.write_str("x"),
            Block::Y => f.write_str("y"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("non-finite value in the {block}-block at iteration {k}")]
    NumericFailure { k: usize, block: Block },

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("{message} (line {line})")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
