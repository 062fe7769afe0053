use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulation, estimation, and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ECA rule number {0} (expected 0..=255)")]
    InvalidRule(u32),

    #[error("cell value {value} at index {index} is outside the {alphabet} alphabet")]
    Alphabet {
        value: i8,
        index: usize,
        alphabet: &'static str,
    },

    #[error("invalid size: {0}")]
    Size(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("index {index} out of bounds for length {len}")]
    Index { index: usize, len: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("no table entries of length {0}; block cannot be scored")]
    Coverage(usize),

    #[error("refusing to enumerate {machines} machines for n={n}: {hint}")]
    ResourceGuard {
        n: u32,
        machines: u64,
        hint: &'static str,
    },

    #[error("corrupt CTM table: {0}")]
    CorruptTable(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
