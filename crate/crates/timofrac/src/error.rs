use std::io;

/// Everything that can stop a harness command, mapped onto exit codes.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error in `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("numerical failure: {0}")]
    Numerical(#[from] timofrac_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("non-finite value in column `{column}` of {file}")]
    NonFinite { file: String, column: String },
}

impl HarnessError {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        HarnessError::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// 2 for configuration problems, 3 for anything that broke a computation
    /// or its output.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
