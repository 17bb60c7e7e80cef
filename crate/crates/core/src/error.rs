use thiserror::Error;

/// Errors raised by the lattice and moduli routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("positivity is only defined for abelian surfaces")]
    UndefinedForK3,

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::InvalidGram(_) => "invalid-gram",
            Error::InvalidInput(_) => "invalid-input",
            Error::Precondition(_) => "precondition",
            Error::UndefinedForK3 => "undefined-for-k3",
            Error::TypeMismatch(_) => "type-mismatch",
            Error::Invariant(_) => "invariant",
        }
    }

    /// Whether the error comes from malformed input rather than a violated
    /// mathematical precondition.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::DimensionMismatch { .. } | Error::InvalidGram(_) | Error::InvalidInput(_))
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
