use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Error, Debug)]
pub enum Error {
    #[error("index {index} out of range for block length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty index set")]
    EmptySet,

    #[error("exhaustive search limited to n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },

    #[error("infeasible degree sequence: {0}")]
    InfeasibleDegreeSequence(String),

    #[error("parity-check matrix is rank deficient (rank {rank} < {rows} rows)")]
    RankDeficient { rank: usize, rows: usize },

    #[error("malformed {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("checksum mismatch for {0}")]
    Checksum(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
