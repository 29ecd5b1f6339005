//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A dimension of one argument does not match its counterpart.
    #[error("dimension mismatch in `{field}`: expected {expected}, got {got}")]
    DimensionMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },

    /// A matrix or vector entry is NaN or infinite where finiteness is required.
    #[error("non-finite entry in `{0}`")]
    NonFinite(&'static str),

    /// A vector that must be unit norm is not (within the documented tolerance).
    #[error("`{field}` must have unit l2 norm, got {norm}")]
    NonUnitNorm { field: &'static str, norm: f64 },

    /// Sparsity level outside `1..=m`.
    #[error("sparsity level {s} out of range 1..={m}")]
    SparsityOutOfRange { s: usize, m: usize },

    /// A parameter failed validation.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// Dense materialization refused: matrix would exceed the configured cap.
    #[error("dense operator size {size} exceeds cap {cap}")]
    DenseCapExceeded { size: usize, cap: usize },

    /// An iteration produced a zero vector and cannot continue.
    #[error("degenerate iteration: {0}")]
    Degenerate(String),

    /// An iterative solver diverged.
    #[error("solver diverged: {0}")]
    Diverged(String),

    /// A linear system could not be factorized.
    #[error("singular system: {0}")]
    SingularSystem(String),

    /// Text-format parse failure, with 1-based line number.
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    /// Experiment or CLI configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
