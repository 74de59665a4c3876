use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    NotFound(PathBuf),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("non-finite or negative texel at ({x}, {y})")]
    InvalidTexel { x: usize, y: usize },

    #[error("not equirectangular 2:1 ({width}x{height})")]
    NotEquirectangular { width: usize, height: usize },

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("quadrature produced a non-finite value in {0}")]
    NonFiniteQuadrature(&'static str),

    #[error("cache {0} has bad magic or version")]
    CacheMismatch(&'static str),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(
        "reference renderer refused: expected microfacets per pixel {expected:.3e} exceeds the desk-scale cap {cap:.0e}"
    )]
    DeskScaleCap { expected: f64, cap: f64 },

    #[error("missing input: {0}")]
    MissingInput(&'static str),

    #[error("image encoding failed: {0}")]
    Encode(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound(path)
        } else {
            Error::Io { path, source }
        }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
