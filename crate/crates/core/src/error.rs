use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("invalid observable: {0}")]
    InvalidObservable(String),
    #[error("symbolic budget exhausted after order {reached} ({terms} terms)")]
    BudgetExhausted { reached: usize, terms: usize },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("basis dimension {dim} exceeds the eigendecomposition limit {limit}")]
    DimensionOverBudget { dim: usize, limit: usize },
    #[error("basis does not belong to {0}")]
    BasisMismatch(String),
    #[error("boundary deficit of order {order} differs between L={first} and L={second}; probe size too small")]
    ProbeMismatch { order: usize, first: usize, second: usize },
    #[error("requested {requested} orders but only {available} are available")]
    TruncationTooHigh { requested: usize, available: usize },
    #[error("series has imaginary coefficients; use the complex evaluator")]
    ComplexSeries,
    #[error("invalid time: {0}")]
    InvalidTime(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("error envelope overflows at t = {t}")]
    EnvelopeOverflow { t: f64 },
    #[error("error envelope tail not converged after {terms} terms")]
    TailNotConverged { terms: usize },
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
