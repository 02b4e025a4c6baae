use std::path::PathBuf;

/// Failure of a CLI invocation, mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unreadable or invalid input files.
    #[error("configuration error: {0}")]
    Config(String),
    /// A state left the physical tolerances during evolution.
    #[error("{0}")]
    Numerical(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Write { .. } => 1,
        }
    }
}

impl From<coinwalk::Error> for CliError {
    fn from(e: coinwalk::Error) -> Self {
        if e.is_numerical() {
            Self::Numerical(e.to_string())
        } else {
            Self::Config(e.to_string())
        }
    }
}

impl From<coinwalk::graph::GraphError> for CliError {
    fn from(e: coinwalk::graph::GraphError) -> Self {
        Self::Config(e.to_string())
    }
}
