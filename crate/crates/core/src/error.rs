use std::io;

use thiserror::Error;

/// Errors produced by the clustering pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("input contains no edge records")]
    EmptyInput,

    #[error("oracle line graph would hold {pairs} pairs, above the cap of {cap}")]
    OracleCapExceeded { pairs: u64, cap: u64 },

    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),

    #[error("minimum cluster size must be at least 2, got {0}")]
    MinClusterSize(usize),

    #[error("unknown cluster id {0}")]
    UnknownCluster(i64),

    #[error("assignment does not match graph: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
