use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("truncation leakage {leakage:.3e} exceeds tolerance {tolerance:.1e} ({context})")]
    Leakage {
        leakage: f64,
        tolerance: f64,
        context: String,
    },
    #[error("herald starvation: success probability {0:.3e}")]
    Starvation(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
