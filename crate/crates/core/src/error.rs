use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range for ground set of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what}: {count} exceeds guard {limit}")]
    GuardExceeded { what: &'static str, count: u128, limit: u128 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("set requirement {k} exceeds set size {size}; no cover time exists")]
    NoCoverTime { k: usize, size: usize },

    #[error("LP solution is infeasible: {0}")]
    InfeasibleSolution(String),

    #[error("{0}")]
    Degenerate(String),

    /// Malformed input document; the message names the offending path.
    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::GuardExceeded { .. })
    }

    /// The input itself is at fault (schema, shape or instance invariants).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Schema(_)
                | Error::InvalidInstance(_)
                | Error::ShapeMismatch(_)
                | Error::IndexOutOfRange { .. }
                | Error::NoCoverTime { .. }
        )
    }
}
