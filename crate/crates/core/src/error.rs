use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Variants are grouped by how a caller is expected to react: `Domain` and
/// `Precondition` mean the inputs were wrong, `NonConvergence` and `NonFinite`
/// mean a numerical routine gave up, and `Degenerate` means a fit technically
/// ran but the result cannot be trusted.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("degenerate result: {0}")]
    Degenerate(String),

    /// A cell or patch with no successful fits was queried.
    #[error("undefined: {0}")]
    Undefined(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
