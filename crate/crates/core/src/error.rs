use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("infeasible flow: {0}")]
    InfeasibleFlow(String),

    /// An enumeration or model size limit was hit.
    #[error("{0}")]
    Budget(String),

    /// A property the solver guarantees did not hold.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        Error::Syntax { line, message: message.into() }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    pub(crate) fn infeasible(message: impl Into<String>) -> Self {
        Error::InfeasibleFlow(message.into())
    }

    /// Process exit code used by the CLI and the C API for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. } | Error::Invalid(_) | Error::InfeasibleFlow(_) => 2,
            Error::Budget(_) => 3,
            Error::Invariant(_) => 4,
        }
    }
}
