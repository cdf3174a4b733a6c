use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("unknown column '{0}'")]
    UnknownColumn(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("solver did not converge after {iterations} iterations (max KKT violation {violation:.3e})")]
    NotConverged {
        iterations: usize,
        violation: f64,
        /// Best iterate reached before giving up.
        alphas: Vec<f64>,
        rho: f64,
    },

    #[error("insufficient data: {required} rows required, {available} available")]
    InsufficientData { required: u64, available: usize },

    #[error("rule extraction did not converge after {clusters} clusters ({offending} boxes still contain points of the other class)")]
    ExtractionNotConverged { clusters: usize, offending: usize },

    #[error("no counterfactual within observed categorical states")]
    NoMatchingRule,

    #[error("{0}")]
    Other(String),
}
