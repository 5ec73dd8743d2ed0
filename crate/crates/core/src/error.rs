use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed, truncated or unsupported encoded data.
    #[error("codec error at byte {offset}: {message}")]
    Codec { offset: usize, message: String },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// No pixel carries a data or stability anchor, so the dense depth system is singular.
    #[error("unsolvable frame: {0}")]
    Unsolvable(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn codec(offset: usize, message: impl Into<String>) -> Self {
        Error::Codec {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
