use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("denominator is identically zero")]
    ZeroDenominator,

    #[error("pole at {0}")]
    Pole(String),

    #[error("matrix is singular (determinant identically zero)")]
    Singular,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("form is not homogeneous of degree {0}")]
    NotHomogeneous(u32),

    #[error("{what} is undefined: {reason}")]
    Degenerate { what: String, reason: String },

    #[error("invariant paths disagree for {0}")]
    PathDisagreement(String),

    #[error("map is not invertible: {0}")]
    NotInvertible(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn degenerate(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Degenerate {
            what: what.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
