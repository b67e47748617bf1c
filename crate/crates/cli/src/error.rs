use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] funcineq::Error),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed config: {0}")]
    Config(#[from] toml::de::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }

    /// 2 for anything the caller got wrong, 3 for numerical or system failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => e.exit_code(),
            CliError::Input(_) | CliError::Json(_) | CliError::Config(_) => 2,
            CliError::Io { .. } | CliError::Pool(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
