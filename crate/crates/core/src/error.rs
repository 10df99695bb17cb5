use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = VafrError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum VafrError {
    /// An argument fell outside the domain of a mapping or curve.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Malformed configuration or inconsistent inputs.
    #[error("invalid {what}: {detail}")]
    Validation { what: &'static str, detail: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image error on {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl VafrError {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        VafrError::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(what: &'static str, detail: impl Into<String>) -> Self {
        VafrError::Validation {
            what,
            detail: detail.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            VafrError::Validation { .. } | VafrError::Json(_) => 2,
            VafrError::Io { .. } | VafrError::Image { .. } => 3,
            VafrError::Domain { .. } => 4,
        }
    }
}
