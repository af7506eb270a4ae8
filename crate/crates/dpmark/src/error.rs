//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a binary PGM: magic is {found:?}, expected \"P5\"")]
    PgmBadMagic { found: String },

    #[error("malformed PGM header: {0}")]
    PgmHeader(String),

    #[error("unsupported PGM maxval {0} (only 255 is supported)")]
    PgmMaxval(u32),

    #[error("truncated PGM payload: expected {expected} bytes, got {actual}")]
    PgmTruncated { expected: usize, actual: usize },

    #[error("dimension mismatch: {a_width}x{a_height} vs {b_width}x{b_height}")]
    DimensionMismatch {
        a_width: usize,
        a_height: usize,
        b_width: usize,
        b_height: usize,
    },

    #[error("image {width}x{height} is not a multiple of block size {block}")]
    NotBlockAligned {
        width: usize,
        height: usize,
        block: usize,
    },

    #[error("unsupported block size {0} (must be 8 or 16)")]
    BadBlockSize(usize),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("wavelet kernel is singular over GF(2): integer determinant {det} is even")]
    SingularKernel { det: i64 },

    #[error("truncation rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error(
        "calibration target {target} dB unreachable: strength {lo_m} gives {lo_psnr:.2} dB, \
         strength {hi_m} gives {hi_psnr:.2} dB"
    )]
    CalibrationUnreachable {
        target: f64,
        lo_m: f64,
        lo_psnr: f64,
        hi_m: f64,
        hi_psnr: f64,
    },

    #[error("bad attack spec {spec:?}: {reason}")]
    BadAttackSpec { spec: String, reason: String },

    #[error("bad config: {0}")]
    BadConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
