use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {field}: {reason}")]
    InvalidDistribution { field: String, reason: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("value {value} of bidder {bidder} is not a support point of its distribution")]
    ValueNotInSupport { bidder: usize, value: f64 },

    #[error("{operation} does not support {feasibility} feasibility")]
    UnsupportedFeasibility {
        operation: &'static str,
        feasibility: &'static str,
    },

    #[error("enumeration budget exceeded: {required} profiles required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("independence oracle is not downward closed: {0}")]
    OracleInconsistent(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dist(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidDistribution {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
