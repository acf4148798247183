use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("sample size {n} too small (need at least {min})")]
    SampleTooSmall { n: usize, min: usize },

    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("singular pooled covariance with lambda = 0; rerun with lambda > 0")]
    SingularCovariance,

    #[error("kernel matrix factorization failed even after jitter up to {max_jitter}")]
    FactorizationFailed { max_jitter: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("proposal budget exhausted: {accepted} of {requested} accepted after {proposals_used} proposals")]
    BudgetExhausted {
        accepted: usize,
        requested: usize,
        proposals_used: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
