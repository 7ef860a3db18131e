use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Magnitudes are reported as `f64` whatever the working scalar type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not Hermitian: max |A - A^dagger| = {violation:e}")]
    NotHermitian { violation: f64 },

    #[error("trace differs from 1 by {violation:e}")]
    NotUnitTrace { violation: f64 },

    #[error("not positive semi-definite: eigenvalue {violation:e} below zero")]
    NotPsd { violation: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("state vector norm squared differs from 1 by {violation:e}")]
    NotNormalized { violation: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("sums differ by {difference:e}")]
    SumMismatch { difference: f64 },

    #[error("rank bound {rank} outside 1..={dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("truncated operator has zero trace")]
    ZeroTrace,

    #[error("amplitude vector is zero")]
    ZeroVector,

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
