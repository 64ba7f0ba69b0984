use std::path::PathBuf;

use thiserror::Error;

/// Failure of one CLI invocation, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Argument(String),

    #[error("{0}")]
    Domain(String),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A check or simulation ran to completion and did not pass.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Argument(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Failure(_) => 4,
        }
    }

    /// The message as one line, suitable for `error: ...` on stderr.
    pub fn single_line(&self) -> String {
        let text = self.to_string();
        text.split_whitespace().collect::<Vec<_>>().join(" ")
    }
}

impl From<equisep::Error> for CliError {
    fn from(e: equisep::Error) -> Self {
        match e {
            equisep::Error::InvalidArgument(msg) => CliError::Argument(msg),
            other => CliError::Domain(other.to_string()),
        }
    }
}
