use thiserror::Error;

/// Errors raised by jet arithmetic, expression handling and the contact checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("index out of range: {0}")]
    Range(String),

    #[error("insufficient jet order: {0}")]
    Order(String),

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("type error: {0}")]
    Type(String),

    #[error("not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
