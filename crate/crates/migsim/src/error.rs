//! Crate-wide error type.

use std::path::PathBuf;

/// Errors reported by the simulator library.
///
/// `Validation` is reserved for scenario-config problems so callers can map
/// it to a distinct exit code; everything math-level uses `InvalidArgument`.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// No carrier or eigenmode can carry power (all gains zero).
    #[error("no usable capacity: {0}")]
    NoCapacity(String),

    /// A refarming plan violates its own guard-rail.
    #[error("refarm policy rejected: {0}")]
    PolicyRejected(String),

    /// Statistical aggregation asked for with too few samples.
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("config validation failed: {0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Unexpected runtime failure (thread pool, serialization).
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
