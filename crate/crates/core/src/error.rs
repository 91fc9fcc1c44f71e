use thiserror::Error;

/// Every failure the library reports. Messages name the violated invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix shape: {0}")]
    InvalidShape(String),

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: max |M - M^dagger| = {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("density matrix trace must be 1, got {trace}")]
    InvalidTrace { trace: f64 },

    #[error("Bloch vector does not describe a state: smallest eigenvalue {min_eigenvalue:e}")]
    NotAState { min_eigenvalue: f64 },

    #[error("invalid dimension {dim}: need at least {min}")]
    InvalidDimension { dim: usize, min: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("states are not iso-spectral: eigenvalues differ by {max_deviation:e}")]
    NotIsoSpectral { max_deviation: f64 },

    #[error("state is maximally mixed: tr[rho^2] - 1/N = {excess:e}")]
    MaximallyMixed { excess: f64 },

    #[error("vector is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
