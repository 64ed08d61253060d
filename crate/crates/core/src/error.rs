use thiserror::Error;

/// Errors raised anywhere in the simulation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: every factor must be at least 2")]
    InvalidDimension { dim: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("subsystem index {index} out of range for {factors} factors")]
    IndexOutOfRange { index: usize, factors: usize },

    #[error("truncation too small for |alpha| = {alpha}: dim {dim} < required {required}")]
    Truncation { alpha: f64, dim: usize, required: usize },

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("step size too large: dt * |H| = {product:.4} exceeds {limit}")]
    StepSize { product: f64, limit: f64 },

    #[error("numerical failure at t = {time}: {reason}")]
    NumericalFailure { time: f64, reason: String },

    #[error("collision run aborted after {completed} collisions: {source}")]
    CollisionAborted {
        completed: usize,
        trace: Box<crate::collision::CollisionTrace>,
        source: Box<Error>,
    },

    #[error("config error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("malformed csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
