use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tableau: {0}")]
    Tableau(String),

    #[error("stage index {stage} out of range 1..={stages}")]
    StageIndex { stage: usize, stages: usize },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("invalid nonlinearity: {0}")]
    Nonlinearity(String),

    #[error("non-finite value at step {step}, stage {stage}")]
    NonFinite { step: usize, stage: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
