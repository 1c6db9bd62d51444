use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the burst synthesis engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid levels: black level {black} must be below white level {white}")]
    InvalidLevels { black: u16, white: u16 },

    #[error("invalid dimensions {width}x{height}: {reason}")]
    InvalidDimensions {
        width: usize,
        height: usize,
        reason: &'static str,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("singular homography (|det| = {det:e})")]
    SingularHomography { det: f64 },

    #[error("degenerate projective denominator at ({x}, {y})")]
    DegeneratePoint { x: f64, y: f64 },

    #[error("degenerate correspondence configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("motion dataset has no homography for frame index {0}")]
    EmptyBucket(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("safety margin of {margin} px leaves no room for a {patch} px patch")]
    MarginExhausted { margin: usize, patch: usize },

    #[error("{size} px patch at ({x}, {y}) outside the {width}x{height} valid region")]
    PatchOutOfBounds {
        x: usize,
        y: usize,
        size: usize,
        width: usize,
        height: usize,
    },

    #[error("unsupported dataset format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("truncated file {path}: expected {expected} bytes, found {found}")]
    Truncated {
        path: PathBuf,
        expected: u64,
        found: u64,
    },

    #[error("checksum mismatch for {path}")]
    ChecksumMismatch { path: PathBuf },

    #[error("malformed file {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    /// Whether the error comes from the filesystem rather than the data itself.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
