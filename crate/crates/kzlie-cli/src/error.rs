use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] kzlie::Error),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON in {path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

impl CliError {
    /// 2 usage or input, 3 resource, 4 accuracy.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(kzlie::Error::Resource(_)) => 3,
            CliError::Lib(kzlie::Error::Accuracy(_)) => 4,
            _ => 2,
        }
    }
}
