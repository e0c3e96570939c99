use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("image must have at least one pixel (got {width}x{height})")]
    EmptyRaster { width: usize, height: usize },

    #[error("pixel buffer holds {actual} samples, expected {expected}")]
    BufferLength { expected: usize, actual: usize },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("histogram has no mass")]
    EmptyHistogram,

    #[error("mask covers no pixels")]
    EmptyMask,

    #[error("constant image cannot be segmented (gray span is zero)")]
    DegenerateImage,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("tile {tile:?} exceeds image {image:?}")]
    TileTooLarge {
        tile: (usize, usize),
        image: (usize, usize),
    },

    #[error("image {width}x{height} is smaller than the required {min}x{min}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },

    #[error("color channels have unequal dimensions")]
    ChannelMismatch,

    #[error("original image has zero contrast; CII is undefined")]
    ZeroContrastOriginal,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
