use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("runtime error: {0}")]
    Runtime(#[from] wfl_core::Error),

    #[error("output error: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn config(e: wfl_core::Error) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(1),
            CliError::Runtime(_) | CliError::Output(_) => ExitCode::from(2),
        }
    }
}
