use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("word budget of {budget} exceeded (partial sum {partial_sum:e}, truncation bound {truncation_bound:e})")]
    BudgetExceeded {
        budget: u64,
        partial_sum: f64,
        truncation_bound: f64,
    },

    #[error("series diverges: {0}")]
    NonConvergent(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
