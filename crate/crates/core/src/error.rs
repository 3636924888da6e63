use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("out of domain: {0}")]
    Domain(String),

    #[error("non-integral value at {what}: this is a bookkeeping bug")]
    NonIntegral { what: String },

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("table too small: {0}")]
    TableTooSmall(String),

    #[error("probability mass off by {deficit:e} at {context}")]
    Normalization { deficit: f64, context: String },

    #[error("numerical method did not converge: {0}")]
    NoConvergence(String),

    #[error("cache format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
