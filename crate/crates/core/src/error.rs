use thiserror::Error;

/// Errors raised by the betting engine, the strategies and the harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid bet grid: {0}")]
    InvalidGrid(String),

    #[error("payoff {value} violates the [-1, 1] contract")]
    PayoffOutOfRange { value: f64 },

    #[error("bet {lambda} with payoff {payoff} would bankrupt the bettor")]
    Bankrupt { lambda: f64, payoff: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("observation does not fit this test: {0}")]
    WrongObservation(String),

    #[error("invalid distribution: {0}")]
    Distribution(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    /// A results file does not have the expected columns.
    #[error("schema mismatch: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
