use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path} at {element}: {message}")]
    Parse {
        path: PathBuf,
        element: String,
        message: String,
    },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate sphere fit: {0}")]
    DegenerateFit(String),

    #[error("detection failure: {0}")]
    DetectionFailure(String),

    #[error("pose normalization failed: {0}")]
    PoseFailure(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable process exit code for the batch CLI: 2 i/o, 3 precondition, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse { .. } => 2,
            Error::InvalidMesh(_)
            | Error::InsufficientData(_)
            | Error::InvalidParameter(_)
            | Error::Config(_) => 3,
            Error::DegenerateFit(_)
            | Error::DetectionFailure(_)
            | Error::PoseFailure(_)
            | Error::SingularSystem(_) => 4,
        }
    }
}
