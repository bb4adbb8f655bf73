use std::path::PathBuf;

use resket_core::Error as CoreError;

use crate::format::FormatError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl CliError {
    /// 2 for bad input or parameters, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } | CliError::Parse { .. } | CliError::Format(_) => 2,
            CliError::Output { .. } | CliError::VerifyFailed(_) => 1,
            CliError::Core(e) => match e {
                CoreError::InvalidGraph(_)
                | CoreError::Disconnected { .. }
                | CoreError::InvalidMatrix(_)
                | CoreError::DimensionMismatch { .. }
                | CoreError::InvalidParameter { .. }
                | CoreError::InvalidVertex { .. }
                | CoreError::KernelViolation { .. }
                | CoreError::ZeroVector
                | CoreError::DenseCapExceeded { .. }
                | CoreError::NotPsd { .. }
                | CoreError::SpectralRadius { .. }
                | CoreError::WeightedInput => 2,
                _ => 1,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
