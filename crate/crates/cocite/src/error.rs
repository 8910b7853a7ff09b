use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library. Variants are grouped by how a caller
/// should react: configuration problems, malformed data, and statistical
/// degeneracy are distinguishable so the CLI can map them to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}:{line}: malformed record: {message}")]
    MalformedRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate paper id {0:?}")]
    DuplicatePaperId(String),

    #[error("unknown subject category {0:?}")]
    UnknownCategory(String),

    #[error("count partitions overlap on citing paper {0:?}")]
    OverlappingPartitions(String),

    #[error("counts were merged over mismatched windows or id tables")]
    MergeMismatch,

    #[error("counts cache: {0}")]
    CacheFormat(String),

    #[error("counts cache window {cache:?} does not match requested window {requested:?}")]
    WindowMismatch { cache: String, requested: String },

    #[error("counts do not cover sampled citing paper {0:?}; counts and sample are out of sync")]
    CountsSampleMismatch(String),

    #[error("degenerate statistics: {0}")]
    DegenerateStatistics(String),

    #[error("synthetic corpus config infeasible: {0}")]
    InfeasibleSynthConfig(String),

    #[error("corpus too large for the brute-force scorer ({n} papers, limit {limit})")]
    OracleCorpusTooLarge { n: usize, limit: usize },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
