use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("training diverged at gradient step {step}")]
    DivergedTraining { step: usize },

    #[error("{}: malformed IDX data at byte offset {offset}: {message}", path.display())]
    IdxFormat {
        path: PathBuf,
        offset: u64,
        message: String,
    },

    #[error("{}: malformed CSV at line {line}: {message}", path.display())]
    CsvFormat {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("degenerate context: {0}")]
    DegenerateContext(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    /// Every violated field of a configuration, one message per field.
    #[error("configuration is invalid:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
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
