use alloc::string::String;

/// Errors raised by the feature, classifier and evaluation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series of length {n} is too short for D={dimension}, tau={delay}")]
    SeriesTooShort { n: usize, dimension: usize, delay: usize },

    #[error("ordinal sequence of {len} patterns has no transitions")]
    SequenceTooShort { len: usize },

    #[error("every trajectory was skipped; the dataset is empty")]
    EmptyDataset,

    #[error("dimension mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
