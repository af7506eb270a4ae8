//! Blind image-in-image watermarking with two-layer DCT QIM and data
//! partitioning, plus deterministic signal-processing attacks and a
//! robustness benchmark harness.
//!
//! A binary logo is split into a half-resolution base part and a ternary
//! enhancement part. The base is embedded into the mid-frequency pair of
//! each 16x16 DCT block with a strong quantization step M; the enhancement
//! symbols go into the corresponding pair of the four 8x8 sub-blocks with a
//! weaker step N. Extraction is blind: only the strengths are needed.

pub mod attack;
pub mod bench;
pub mod dct;
pub mod error;
pub mod metrics;
pub mod partition;
pub mod pgm;
pub mod plane;
pub mod qim;
pub mod synth;
pub mod watermark;

pub use error::{Error, Result};
pub use metrics::{ber, psnr, Psnr};
pub use plane::{binarize, BitPlane, GrayImage, RealPlane, TernaryPlane};
