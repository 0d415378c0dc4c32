//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by the docbench pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A file or directory could not be read or written.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// An argument violated an operation's contract.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The run configuration is unusable (bad key, missing credential, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A generation backend failed after exhausting its retries.
    #[error("backend error: {0}")]
    Backend(String),

    /// An input string is not one of the supported languages.
    #[error("unknown language: {0:?}")]
    UnknownLanguage(String),

    /// An input string is not one of the supported split labels.
    #[error("unknown split: {0:?}")]
    UnknownSplit(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
