use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("problem file: {0}")]
    Json(serde_json::Error),

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] koszul_core::Error),

    #[error("{op}: {source}")]
    Op { op: String, source: koszul_core::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Attaches the operation name to engine errors.
pub trait Context<T> {
    fn during(self, op: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for Result<T, koszul_core::Error> {
    fn during(self, op: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Op { op: op.to_string(), source })
    }
}

impl<T> Context<T> for Result<T, CliError> {
    fn during(self, op: &str) -> Result<T, CliError> {
        self.map_err(|e| match e {
            CliError::Core(source) => CliError::Op { op: op.to_string(), source },
            other => other,
        })
    }
}
