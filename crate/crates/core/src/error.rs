//! Error type shared by all modules.
//!
//! Law checks report through [`crate::report::Report`]; `Error` is reserved
//! for structural problems: malformed input, mismatched groupoids, data that
//! fails a precondition.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("groupoid mismatch: {0}")]
    GroupoidMismatch(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("not invariant: witness {0}")]
    NotInvariant(String),

    #[error("not quasi-invariant: witness {0}")]
    NotQuasiInvariant(String),

    #[error("not a coboundary: witness arrow {0}")]
    NotACoboundary(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
