use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl LabError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 1,
            LabError::Runtime(_) => 2,
            LabError::Assertion(_) => 3,
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Runtime(e.to_string())
    }
}

impl From<subquery_core::strategies::StrategyError> for LabError {
    fn from(e: subquery_core::strategies::StrategyError) -> Self {
        LabError::Runtime(e.to_string())
    }
}

impl From<subquery_core::clique::CliqueError> for LabError {
    fn from(e: subquery_core::clique::CliqueError) -> Self {
        LabError::Runtime(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
