use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The caller violated a documented precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// An internal identity failed. This is a bug, never a property of the input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(
        "precision {requested:e} unreachable with {n_terms} series terms (about {required_terms} needed)"
    )]
    PrecisionUnreachable {
        requested: f64,
        n_terms: usize,
        required_terms: usize,
    },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
