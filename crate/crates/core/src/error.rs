use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: {combos} combos but {coefficients} coefficients")]
    LengthMismatch { combos: usize, coefficients: usize },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("spectral value {0} outside (-1, 1)")]
    ValueOutOfRange(String),
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid graph: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),
    #[error("invalid type: {0}")]
    InvalidType(String),
    #[error("non-integral result: {0}")]
    NonIntegral(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("ambiguous: {0}")]
    Ambiguous(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("reduction did not terminate within depth {0}")]
    DepthExceeded(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
