use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(dwell_core::Error),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<dwell_core::Error> for CliError {
    fn from(err: dwell_core::Error) -> Self {
        use dwell_core::Error as E;
        match err {
            // Bad inputs that slipped past config validation.
            E::InvalidParameter(_)
            | E::InvalidBeta(_)
            | E::DegenerateGroundState { .. }
            | E::LiouvillianTooLarge { .. }
            | E::UnsupportedBasis { .. } => CliError::Config(err.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
