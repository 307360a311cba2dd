use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("omega vector has length {got}, expected {expected}")]
    OmegaLength { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("signal length {len} is not a whole number of {unit}-sample blocks")]
    Length { len: usize, unit: usize },

    #[error("segment length {segment} exceeds signal length {len}")]
    SegmentTooLong { segment: usize, len: usize },

    #[error("zero-magnitude sample at index {0}")]
    ZeroMagnitude(usize),

    #[error("spectral mask covers [{mask_lo}, {mask_hi}] Hz but the estimate spans [{psd_lo}, {psd_hi}] Hz")]
    MaskTooNarrow {
        mask_lo: f64,
        mask_hi: f64,
        psd_lo: f64,
        psd_hi: f64,
    },

    #[error("invalid spectral mask: {0}")]
    InvalidMask(String),

    #[error("invalid baseline: {0}")]
    InvalidBaseline(String),
}
