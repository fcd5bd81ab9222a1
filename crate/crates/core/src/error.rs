use thiserror::Error;

/// Errors raised by the numeric core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid image dimensions {width}x{height} for {len} samples")]
    Dimensions { width: usize, height: usize, len: usize },

    #[error("image contains a non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },

    #[error("mirror padding radius {radius} is undefined for a {width}x{height} image")]
    PadRadius { radius: usize, width: usize, height: usize },

    #[error("window of side {side} centred at ({row}, {col}) exceeds {width}x{height} grid")]
    OutOfBounds { row: isize, col: isize, side: usize, width: usize, height: usize },

    #[error("{levels} decomposition levels need filters of support {support} < {min_side}")]
    TooManyLevels { levels: usize, support: usize, min_side: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pixel i == j has no modified weight; use the self-weight rule")]
    SelfComparison,
}

pub type Result<T> = std::result::Result<T, Error>;
