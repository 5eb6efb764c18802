use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation: flags, missing prerequisites, refusing to overwrite.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Data(#[from] flowspec_core::Error),

    #[error("{context}: {source}")]
    DataContext {
        context: String,
        source: flowspec_core::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}
