use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("bit count {0} outside supported range 1..={max}", max = crate::MAX_BITS)]
    BitCount(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("gate matrix is not unitary (deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("{what} supports at most {max}, got {actual}; {hint}")]
    TooLarge {
        what: &'static str,
        max: usize,
        actual: usize,
        hint: &'static str,
    },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("board seed mismatch: {0}")]
    BoardMismatch(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the filesystem rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
