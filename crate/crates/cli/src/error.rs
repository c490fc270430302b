use thiserror::Error;

/// Failures that abort a command. Divergence is not among them: it yields a
/// result (the best finite iterate) together with [`Status::Diverged`].
#[derive(Debug, Error)]
pub enum CliError {
    /// Unparseable or invalid input; exit code 2.
    #[error("invalid input: {0}")]
    Spec(String),
    /// Numerical failure during computation; exit code 1.
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn spec(e: impl std::fmt::Display) -> Self {
        CliError::Spec(e.to_string())
    }

    pub fn compute(e: impl std::fmt::Display) -> Self {
        CliError::Compute(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

/// How a command that produced output finished.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// At least one projection hit the coefficient cap; exit code 3.
    Diverged,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Diverged => 3,
        }
    }
}
