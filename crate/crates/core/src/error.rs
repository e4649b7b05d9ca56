use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the labeling engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    ObjParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("mesh {0} has no usable triangles")]
    EmptyMesh(String),

    #[error("acceleration structure needs at least one instance")]
    EmptyScene,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient support: {found} neighbors within radius (need {needed})")]
    InsufficientSupport { found: usize, needed: usize },

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("unknown asset `{0}`")]
    UnknownAsset(String),

    #[error("unknown gripper `{0}`")]
    UnknownGripper(String),

    #[error("unknown suction cup `{0}`")]
    UnknownCup(String),

    #[error("variant `{variant}` does not apply to {modality} candidates")]
    SpecMismatch { variant: String, modality: String },

    #[error("id mismatch: {0}")]
    IdMismatch(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("image: {0}")]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Image(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
