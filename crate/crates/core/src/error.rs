use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state corruption: {0}")]
    StateCorruption(String),

    #[error("positivity violation: eigenvalue {eigenvalue:e} below tolerance")]
    PositivityViolation { eigenvalue: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {message} (error estimate {estimate:e})")]
    NumericalFailure { message: String, estimate: f64 },

    #[error("internal consistency: {0}")]
    InternalConsistency(String),

    #[error("integration aborted at t = {time}: eigenvalue {eigenvalue:e}")]
    IntegrationAbort { time: f64, eigenvalue: f64 },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Wraps the error with a short description of where it happened.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// Whether this is a numerical problem (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        !matches!(self.root(), Error::InvalidArgument(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
