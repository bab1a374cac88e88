use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A file could not be parsed; carries the 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    /// An input violated a documented precondition or invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A numeric routine failed (non-finite input, no convergence, degenerate basis).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Requested subset size exceeds the effective rank of the kernel.
    #[error("insufficient rank: k = {k} exceeds effective rank {rank}")]
    InsufficientRank { k: usize, rank: usize },

    /// Fewer selectable instances than the requested subset size.
    #[error("insufficient support: need {needed} selectable instances, have {available}")]
    InsufficientSupport { needed: usize, available: usize },

    /// Feature dimensions of two inputs do not agree.
    #[error("dimension mismatch: {expected} vs {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
