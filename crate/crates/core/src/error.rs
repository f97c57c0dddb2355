use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input document (map extract, CSV, JSON).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Input violates a precondition (unknown node, bad range, schema mismatch).
    #[error("invalid input: {0}")]
    Input(String),

    /// Computation refused because the instance exceeds a hard size guard.
    #[error("instance exceeds solver guard: {0}")]
    Guard(String),

    /// Value outside the domain of an operation (empty ride set, zero ride time).
    #[error("domain error: {0}")]
    Domain(String),

    /// Pipeline produced an empty or degenerate result.
    #[error("empty result: {0}")]
    Empty(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
