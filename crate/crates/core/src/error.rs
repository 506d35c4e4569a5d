use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("not representable: {0}")]
    NotRepresentable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("synthesis diverged after examining {candidates} candidates")]
    Diverged { candidates: u64 },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
