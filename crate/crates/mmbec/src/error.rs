use std::path::PathBuf;

/// Errors raised by the watermarking library.
#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: unsupported image format ({detail})")]
    UnsupportedFormat { path: PathBuf, detail: String },

    #[error("{path}: corrupt payload ({detail})")]
    CorruptImage { path: PathBuf, detail: String },

    #[error("image dimensions {width}x{height} are not multiples of 8")]
    MisalignedImage { width: u32, height: u32 },

    #[error("image dimensions {width}x{height} overflow the addressable size")]
    DimensionOverflow { width: u64, height: u64 },

    #[error("watermark needs {needed} bits but the image holds {capacity}")]
    CapacityExceeded { needed: usize, capacity: usize },

    #[error("bit sequences differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("quality factor {qf} is outside [1, 100]")]
    QualityOutOfRange { qf: u32 },

    #[error("secret keyword must not be empty")]
    EmptyKeyword,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn corrupt(path: impl Into<PathBuf>, detail: impl Into<String>) -> Self {
        Error::CorruptImage {
            path: path.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn unsupported(path: impl Into<PathBuf>, detail: impl Into<String>) -> Self {
        Error::UnsupportedFormat {
            path: path.into(),
            detail: detail.into(),
        }
    }
}
