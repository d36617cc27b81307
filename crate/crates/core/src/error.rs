use thiserror::Error;

#[derive(Debug, Error)]
pub enum OptError {
    /// A caller broke a documented precondition (bad index, wrong length,
    /// invalid configuration value).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A component oracle produced a NaN or infinity.
    #[error("non-finite oracle output from component {index}")]
    NonFiniteOracle { index: usize },

    /// An optimizer iterate left the representable range.
    #[error("non-finite iterate at iteration {iteration} ({context})")]
    NonFiniteIterate { iteration: u64, context: &'static str },

    /// Generic numeric failure with context.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Problem construction could not satisfy its invariants.
    #[error("construction failed: {0}")]
    Construction(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {reason}")]
    Format { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, OptError>;

pub(crate) fn contract(msg: impl Into<String>) -> OptError {
    OptError::Contract(msg.into())
}
