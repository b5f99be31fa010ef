use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {field}: {message}")]
    Parse {
        path: PathBuf,
        field: String,
        message: String,
    },
    #[error("{context}: {source}")]
    Input {
        context: String,
        #[source]
        source: ncvar::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn input(context: impl Into<String>, source: ncvar::Error) -> Self {
        CliError::Input {
            context: context.into(),
            source,
        }
    }

    /// Usage, parse and input errors all map to exit code 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
