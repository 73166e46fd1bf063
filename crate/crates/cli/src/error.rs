use thiserror::Error;

/// Harness failures, mapped onto the process exit codes:
/// 1 for configuration problems, 2 for numerical failures, 3 when the check
/// suite finds a broken group.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("check suite failed: {0}")]
    CheckFailed(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => 1,
            HarnessError::Numerical(_) => 2,
            HarnessError::CheckFailed(_) => 3,
        }
    }
}

impl From<dwmgrad::Error> for HarnessError {
    fn from(e: dwmgrad::Error) -> Self {
        match e {
            dwmgrad::Error::NonFiniteInput(m) | dwmgrad::Error::NonFiniteResult(m) => {
                HarnessError::Numerical(m)
            }
            other => HarnessError::Config(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
