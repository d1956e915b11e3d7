use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside its valid domain (probability, load, worker count, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An operation was called in a way its contract does not allow.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// A receiver could not reconstruct the sender's table layout.
    #[error("decode failure in group {group}, sender {sender}, column {column}: {message}")]
    Decode {
        group: String,
        sender: usize,
        column: usize,
        message: String,
    },

    /// Internal bookkeeping disagreed with itself (missing map output, incomplete shuffle, ...).
    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }

    /// True for errors caused by bad input rather than a failure while working.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Parameter(_) | Error::Usage(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
