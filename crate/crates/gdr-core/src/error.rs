use thiserror::Error;

/// Errors produced by dataset I/O, the eigensolver, and the transform engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("label column '{column}' not found in {path}")]
    MissingLabelColumn { column: String, path: String },

    #[error("cell at row {row}, column '{column}' is not a finite number: '{value}'")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {max_asym:e})")]
    NotSymmetric { max_asym: f64 },

    #[error(
        "eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("data must have at least 3 feature dimensions for the space manifold, got {got}")]
    ManifoldTooSmall { got: usize },

    #[error("neighborhood size k={k} requires at least k+1 points, class has {points}")]
    NeighborhoodTooLarge { k: usize, points: usize },

    #[error("reachability of point {index} to itself is undefined")]
    SamePoint { index: usize },

    #[error("invalid coordinate weights: {0}")]
    InvalidWeights(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
