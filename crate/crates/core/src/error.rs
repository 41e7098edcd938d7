use thiserror::Error;

/// Errors raised by the numeric and number-theoretic routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),

    #[error("precision: {0}")]
    Precision(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("normalization: {0}")]
    Normalization(String),

    #[error("tolerance: {0}")]
    Tolerance(String),

    #[error("coefficient table too short: need {needed} coefficients, have {have}")]
    Cutoff { needed: usize, have: usize },

    #[error("outside valid regime: {0}")]
    Regime(String),

    #[error("poles too close: {0}")]
    Separation(String),

    #[error("search failed: {0}")]
    Search(String),

    #[error("ambiguous: {0}")]
    Ambiguity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
