use thiserror::Error;

/// Errors raised by the evaluation engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid jet shape: {0}")]
    InvalidShape(String),

    #[error("jet shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<u8>, right: Vec<u8> },

    #[error("variable index {index} out of range for a jet in {vars} variable(s)")]
    VariableOutOfRange { index: usize, vars: usize },

    #[error("derivative orders {requested:?} exceed jet orders {orders:?}")]
    OrderExceedsShape { requested: Vec<u8>, orders: Vec<u8> },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite integrand value at node {coords:?}")]
    NonFinite { coords: Vec<f64> },

    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("aggregate constant must be positive, got {0}")]
    InvalidAggregate(f64),

    #[error("near-singular input: {0}")]
    NearSingular(String),

    #[error("free-parameter vector: {0}")]
    FreeParams(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for failures caused by non-finite arithmetic rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFinite { .. } | Error::InvalidAggregate(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
