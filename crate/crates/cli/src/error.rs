use thiserror::Error;

/// Failures of the command-line front end, each mapped to an exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in {source_name}: {message}")]
    Config { source_name: String, message: String },

    #[error("numerical failure in {context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: crossstitch::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("validation failed: {0} check(s) outside tolerance")]
    ValidationFailed(usize),
}

impl CliError {
    pub fn config(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            source_name: source_name.into(),
            message: message.into(),
        }
    }

    pub fn numerical(context: impl Into<String>, source: crossstitch::Error) -> Self {
        Self::Numerical {
            context: context.into(),
            source,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// 1 validation failure, 2 config error, 3 numerical tolerance failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::ValidationFailed(_) => 1,
            Self::Config { .. } | Self::Io { .. } => 2,
            Self::Numerical { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
