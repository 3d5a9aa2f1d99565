use thiserror::Error;

/// Errors raised by the teleportation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity exceeded: {what} = {requested} (limit {limit})")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    Accuracy { estimate: f64, tolerance: f64 },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("objective not finite at delta = {delta}: {message}")]
    Evaluation { delta: f64, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag, used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Capacity { .. } => "capacity",
            Error::Accuracy { .. } => "accuracy",
            Error::Consistency(_) => "consistency",
            Error::DegenerateState(_) => "degenerate_state",
            Error::Evaluation { .. } => "evaluation",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
