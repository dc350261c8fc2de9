use thiserror::Error;

/// Everything that can go wrong while building or measuring a state.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {dim} is too small (need at least 2)")]
    DimensionTooSmall { dim: usize },

    #[error("matrix has {found} entries, expected {expected}")]
    EntryCount { expected: usize, found: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not Hermitian: |rho_ij - conj(rho_ji)| = {deviation:e} at ({row}, {col})")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("trace is {trace} (expected 1)")]
    NotUnitTrace { trace: f64 },

    #[error("not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPSD { min_eigenvalue: f64 },

    #[error("purity {purity} exceeds 1")]
    PurityOutOfRange { purity: f64 },

    #[error("Hermitian eigensolver did not converge for a {dim}x{dim} matrix")]
    EigenSolverFailure { dim: usize },

    #[error("rank {rank} is invalid for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("operation requires dimension {expected}, got {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("Bloch vector has {found} components, expected {expected}")]
    ComponentCount { expected: usize, found: usize },

    #[error("diagonal is concentrated on one basis vector; the degree of coherence is 0/0")]
    DegenerateDiagonal,

    #[error("all probabilities are zero")]
    AllZero,

    #[error("internal invariant violated: {what} (discrepancy {discrepancy:e})")]
    InternalInvariantViolation { what: String, discrepancy: f64 },

    #[error("state has no nonzero coefficients")]
    EmptyState,

    #[error("not normalized: total {total} deviates from 1 by more than {tolerance:e}")]
    NotNormalized { total: f64, tolerance: f64 },

    #[error("angular grid of {grid} points is too coarse; need at least {required}")]
    GridTooCoarse { grid: usize, required: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the error reports an unphysical or malformed input, as opposed
    /// to a failure inside the numerics.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::InternalInvariantViolation { .. } | Error::EigenSolverFailure { .. }
        )
    }
}
