use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by every stage of the embed / attack / extract pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),

    #[error("unsupported image dimensions {width}x{height} (need a square power-of-two side >= 32)")]
    DimensionUnsupported { width: usize, height: usize },

    #[error("truncated PGM payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    #[error("non-finite sample at index {0}")]
    NonFiniteValue(usize),

    #[error("pixel count {found} does not match {width}x{height}")]
    PixelCountMismatch {
        width: usize,
        height: usize,
        found: usize,
    },

    #[error("malformed coefficient set: {0}")]
    MalformedCoefficients(String),

    #[error("scale {scale} out of range 1..={max} for this image size")]
    ScaleOutOfRange { scale: u32, max: u32 },

    #[error("no block at scale {scale} with band index ({m1}, {m2})")]
    UnknownBlock { scale: u32, m1: usize, m2: usize },

    #[error("block grid has {found} values, expected {expected}")]
    BlockShapeMismatch { expected: usize, found: usize },

    #[error("uniform_below called with bound 0")]
    InvalidBound,

    #[error("capacity exceeded: {requested} bits requested but only {capacity} blocks available")]
    CapacityExceeded { requested: usize, capacity: usize },

    #[error("message of {0} bytes exceeds the 65535-byte limit")]
    MessageTooLong(usize),

    #[error("truncated message: header declares {declared} bytes but only {available} bits follow")]
    TruncatedMessage { declared: usize, available: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("watermark strength must be positive and finite, got {0}")]
    InvalidStrength(f64),

    #[error("noise sigma must be non-negative and finite, got {0}")]
    NegativeSigma(f64),

    #[error("JPEG quality {0} outside 1..=100")]
    QualityOutOfRange(i64),

    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("empty input")]
    EmptyInput,

    #[error("invalid key {0:?} (expected decimal or 0x-prefixed hex u64)")]
    InvalidKey(String),

    #[error("invalid attack spec: {0}")]
    InvalidAttack(String),

    #[error("invalid sweep config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
