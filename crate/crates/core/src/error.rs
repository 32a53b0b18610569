//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by matrix construction, solving, fitting and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found} in {context}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    /// A (min,+) reduction had no given pair to minimize over. This signals
    /// violated row/column coverage of the masked input.
    #[error("empty minimum at output entry ({row}, {col}): no given pair covers it")]
    EmptyMinimum { row: usize, col: usize },

    #[error("matrix entry ({row}, {col}) is given but not finite: {value}")]
    NonFiniteEntry { row: usize, col: usize, value: f64 },

    #[error("row {0} has no given entries")]
    UncoveredRow(usize),

    #[error("column {0} has no given entries")]
    UncoveredColumn(usize),

    #[error("invalid factorization rank {rank} for a {rows}x{cols} matrix")]
    InvalidRank {
        rank: usize,
        rows: usize,
        cols: usize,
    },

    #[error("negative input at ({row}, {col}): {value}")]
    NegativeInput { row: usize, col: usize, value: f64 },

    #[error("selection is empty: no entries to evaluate")]
    EmptySelection,

    #[error("row count mismatch: left has {left} rows, right has {right}")]
    RowCountMismatch { left: usize, right: usize },

    #[error("silhouette requires at least two clusters, found {0}")]
    SingleCluster(usize),

    #[error("invalid cluster count {requested} for {available} columns")]
    InvalidClusterCount {
        requested: usize,
        available: usize,
    },

    #[error("cannot split {given} given entries into a {test_fraction} test fraction while keeping every row and column covered")]
    InfeasibleSplit { given: usize, test_fraction: f64 },

    #[error("invalid mask fraction {0}: must lie strictly between 0 and 1")]
    InvalidFraction(f64),

    #[error("{path}:{row}:{col}: {message}")]
    Parse {
        path: String,
        row: usize,
        col: usize,
        message: String,
    },

    #[error("{path}: row {row} has {found} cells, expected {expected}")]
    RaggedRows {
        path: String,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
