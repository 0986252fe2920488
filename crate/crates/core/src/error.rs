use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside an operation's domain (wrong sizes, k = 0, odd mode count, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An input violated a structural contract (antisymmetry, orthogonality, Hermiticity).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Rank-deficient input to a factorisation; callers resample.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Rotation with a -1 eigenvalue pair: the principal logarithm is not unique.
    #[error("branch ambiguity: {0}")]
    BranchAmbiguity(String),

    /// Loss of accuracy or a non-finite intermediate.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Request exceeds a configured resource limit (dense Hilbert-space size).
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
