use thiserror::Error;

/// Failure classes, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid experiment spec: {0}")]
    Schema(String),
    #[error("computation failed: {0}")]
    Computation(#[from] coiso::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Schema(_) => 2,
            Self::Computation(_) | Self::Io { .. } => 3,
        }
    }
}
