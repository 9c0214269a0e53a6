use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MISSING: i32 = 3;

/// Failure of an experiment command, mapped onto a process exit code.
#[derive(Debug, Error)]
pub enum ExpError {
    #[error("config error: {0}")]
    Config(String),
    #[error("missing artifact: {0}")]
    Missing(String),
    #[error("regression: {0}")]
    Regression(String),
    #[error(transparent)]
    Runtime(#[from] crate::Error),
}

impl ExpError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExpError::Config(_) | ExpError::Runtime(crate::Error::Config(_)) => EXIT_CONFIG,
            ExpError::Missing(_) => EXIT_MISSING,
            ExpError::Regression(_) | ExpError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}
