use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("construction failed: {0}")]
    Construction(String),

    #[error("derivative of order {requested} requested but only {available} available")]
    UnsupportedOrder { requested: usize, available: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation produced a non-finite value at {at}")]
    NonFinite { at: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no compactly supported solution: cumulative action {residual:e} at the right end")]
    NoCompactSolution { residual: f64 },

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("direction leaves the set; normal functional {certificate:?} is negative on it")]
    OutsideDirection { certificate: Vec<f64> },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
