//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("matrix is not Hermitian: residual {0:.3e}")]
    NotHermitian(f64),

    #[error("not a valid density operator: {0}")]
    InvalidDensity(String),

    #[error("not a valid test (0 <= A <= I violated): {0}")]
    InvalidTest(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("matrix sqrt of non-PSD input: eigenvalue {0:.3e}")]
    NegativeEigenvalue(f64),

    #[error("output dimension {dim} exceeds limit {limit}")]
    DimLimitExceeded { dim: u128, limit: usize },

    #[error("enumeration of {count} codewords exceeds limit {limit}")]
    EnumLimitExceeded { count: u128, limit: u128 },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("channel spec: {0}")]
    ChannelSpec(String),

    #[error("support of rho is not contained in support of sigma")]
    SupportViolation,

    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    #[error("capacity iteration did not converge: gap {gap:.3e} after {iterations} iterations")]
    NonConvergence { gap: f64, iterations: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json parse error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimLimitExceeded { .. } | Error::EnumLimitExceeded { .. } => 3,
            Error::Io(_) | Error::Json(_) | Error::ChannelSpec(_) => 2,
            _ => 1,
        }
    }
}
