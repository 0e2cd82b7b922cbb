//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value failed validation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A documented precondition does not hold for the given inputs.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An exact computation was requested at a size we refuse to enumerate.
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    /// A model fit is not identifiable from the data.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// Malformed content in a CSV input. `line` is 1-based and counts the header.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
