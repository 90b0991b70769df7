use std::path::PathBuf;

use lommel_core::Error as CoreError;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const DOMAIN: u8 = 2;
    pub const CONVERGENCE: u8 = 3;
    /// A check ran to completion and did not pass.
    pub const CHECK_FAILED: u8 = 4;
    pub const IO: u8 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } => exit::USAGE,
            CliError::Core(e) => match e {
                CoreError::Domain(_) | CoreError::PoleHit { .. } => exit::DOMAIN,
                CoreError::NonConvergence { .. } | CoreError::QuadratureFailure { .. } => exit::CONVERGENCE,
                CoreError::WindowMismatch(_) | CoreError::MissingZeroTable(_) | CoreError::InvalidConfig(_) => {
                    exit::USAGE
                }
            },
            CliError::Write { .. } | CliError::Io(_) => exit::IO,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
