//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed map file or config text; carries the 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Invalid configuration (bad ranges, missing files, impossible layouts).
    #[error("configuration error: {0}")]
    Config(String),

    /// Numerical failure that survived the documented recovery attempts.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A caller violated an API contract (e.g. an unsafe action reached the
    /// environment, which the consensus layer must prevent).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A metric is undefined on the given inputs (all-zero ground truth,
    /// peak-free field).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
