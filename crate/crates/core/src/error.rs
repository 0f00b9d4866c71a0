use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("element is not in the ambient group: {0}")]
    NotInAmbient(String),
    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),
    #[error("oracle budget exhausted after {budget_used} candidates")]
    OracleExhausted { budget_used: u64 },
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("order mismatch between cyclic generators: {0} vs {1}")]
    OrderMismatch(String, String),
    #[error("rank mismatch: declared {declared}, computed {computed}")]
    RankMismatch { declared: usize, computed: usize },
    #[error("invariant factors differ: {0}")]
    FactorMismatch(String),
    #[error("impossible image: {0}")]
    ImpossibleImage(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

impl Error {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
