use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gme_core::Error),

    #[error("at q = {q}: {source}")]
    AtParameter { q: f64, source: gme_core::Error },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }

    fn core(&self) -> Option<&gme_core::Error> {
        match self {
            CliError::Core(e) | CliError::AtParameter { source: e, .. } => Some(e),
            _ => None,
        }
    }

    /// 3 when a bound provider broke its contract, 2 for every other failure.
    pub fn exit_code(&self) -> i32 {
        match self.core() {
            Some(gme_core::Error::UnsoundBound { .. }) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
