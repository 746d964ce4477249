use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument fell outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration value; `key` names the offending entry.
    #[error("invalid config `{key}`: {message}")]
    Config { key: String, message: String },

    /// Operation requested in a channel mode that does not support it.
    #[error("mode error: {0}")]
    Mode(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { key: key.into(), message: message.into() }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for configuration-class failures (bad values, parse errors).
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::Domain(_) | Error::Mode(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
