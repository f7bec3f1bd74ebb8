use thiserror::Error;

/// Errors raised by the operator kernel, the oracles and the I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("vector is not normalised (norm {0})")]
    NotNormalized(f64),

    #[error("input is not a state: {0}")]
    NotAState(String),

    #[error("map precondition violated: {0}")]
    MapPrecondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("problem exceeds supported scale: {0}")]
    ScaleExceeded(String),

    #[error("affine hulls differ: {0}")]
    AffineHullMismatch(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
