use thiserror::Error;

/// Errors raised by optimizer construction, stepping, objectives and audits.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Vector lengths disagree.
    #[error("shape mismatch: expected length {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    /// An input carried a NaN or infinity; the step was rejected and
    /// the optimizer state is unchanged.
    #[error("non-finite input rejected: {0}")]
    NonFiniteInput(String),

    /// A step produced non-finite parameters. The run has diverged and the
    /// optimizer state is no longer valid.
    #[error("non-finite result: {0}")]
    NonFiniteResult(String),

    /// An audit was asked for data the trajectory does not carry.
    #[error("trajectory is missing required data: {0}")]
    MissingData(String),

    /// A postcondition guaranteed by construction was violated.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
