//! Image and plane containers.
//!
//! All types are immutable value objects after construction; every operation
//! in the crate takes them by reference and returns fresh values, so they are
//! safe to share across threads.

use crate::error::{Error, Result};

/// Row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if samples.len() != width * height {
            return Err(Error::InvalidParam(format!(
                "sample buffer length {} does not match {}x{}",
                samples.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            samples: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.samples[row * self.width + col]
    }

    pub fn same_dims(&self, other: &GrayImage) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch {
                a_width: self.width,
                a_height: self.height,
                b_width: other.width,
                b_height: other.height,
            });
        }
        Ok(())
    }
}

/// Row-major binary plane over {0,1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitPlane {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl BitPlane {
    pub fn new(width: usize, height: usize, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::InvalidParam(format!(
                "bit buffer length {} does not match {}x{}",
                bits.len(),
                width,
                height
            )));
        }
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParam(format!(
                "bit plane entry {bad} outside {{0,1}}"
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, bit: u8) {
        debug_assert!(bit <= 1);
        self.bits[row * self.width + col] = bit;
    }

    /// Bitwise complement, useful in tests and the BER identity.
    pub fn complement(&self) -> BitPlane {
        BitPlane {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| b ^ 1).collect(),
        }
    }

    pub fn same_dims(&self, other: &BitPlane) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch {
                a_width: self.width,
                a_height: self.height,
                b_width: other.width,
                b_height: other.height,
            });
        }
        Ok(())
    }

    /// Renders the plane as a 0/255 grayscale image.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            samples: self.bits.iter().map(|&b| if b == 1 { 255 } else { 0 }).collect(),
        }
    }
}

/// Row-major ternary plane over {-1, 0, +1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryPlane {
    width: usize,
    height: usize,
    symbols: Vec<i8>,
}

impl TernaryPlane {
    pub fn new(width: usize, height: usize, symbols: Vec<i8>) -> Result<Self> {
        if symbols.len() != width * height {
            return Err(Error::InvalidParam(format!(
                "symbol buffer length {} does not match {}x{}",
                symbols.len(),
                width,
                height
            )));
        }
        if let Some(bad) = symbols.iter().find(|&&s| !(-1..=1).contains(&s)) {
            return Err(Error::InvalidParam(format!(
                "ternary entry {bad} outside {{-1,0,+1}}"
            )));
        }
        Ok(Self {
            width,
            height,
            symbols,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            symbols: vec![0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn symbols(&self) -> &[i8] {
        &self.symbols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.symbols[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, symbol: i8) {
        debug_assert!((-1..=1).contains(&symbol));
        self.symbols[row * self.width + col] = symbol;
    }
}

/// Row-major plane of finite reals (SVD partitions are not luminance-limited).
#[derive(Debug, Clone, PartialEq)]
pub struct RealPlane {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl RealPlane {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::InvalidParam(format!(
                "value buffer length {} does not match {}x{}",
                values.len(),
                width,
                height
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParam("non-finite real plane entry".into()));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    /// Number of distinct values (the alphabet size K of this part).
    pub fn alphabet_size(&self) -> usize {
        let mut seen: Vec<u64> = self.values.iter().map(|v| v.to_bits()).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

/// Thresholds a grayscale image into a bit plane: bit = 1 iff sample >= threshold.
pub fn binarize(img: &GrayImage, threshold: u8) -> BitPlane {
    BitPlane {
        width: img.width,
        height: img.height,
        bits: img
            .samples
            .iter()
            .map(|&s| u8::from(s >= threshold))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_image_length_check() {
        assert!(GrayImage::new(4, 4, vec![0; 15]).is_err());
        assert!(GrayImage::new(4, 4, vec![0; 16]).is_ok());
    }

    #[test]
    fn bit_plane_rejects_non_binary() {
        assert!(BitPlane::new(2, 1, vec![0, 2]).is_err());
        assert!(BitPlane::new(2, 1, vec![0, 1]).is_ok());
    }

    #[test]
    fn ternary_plane_rejects_out_of_range() {
        assert!(TernaryPlane::new(2, 1, vec![-2, 0]).is_err());
        assert!(TernaryPlane::new(3, 1, vec![-1, 0, 1]).is_ok());
    }

    #[test]
    fn binarize_threshold_is_inclusive() {
        let all_128 = GrayImage::filled(3, 3, 128);
        assert!(binarize(&all_128, 128).bits().iter().all(|&b| b == 1));
        let all_127 = GrayImage::filled(3, 3, 127);
        assert!(binarize(&all_127, 128).bits().iter().all(|&b| b == 0));
    }

    #[test]
    fn binarize_checkerboard() {
        let samples: Vec<u8> = (0..16)
            .map(|i| if (i / 4 + i % 4) % 2 == 0 { 0 } else { 255 })
            .collect();
        let img = GrayImage::new(4, 4, samples).unwrap();
        let bits = binarize(&img, 128);
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(bits.get(r, c), u8::from((r + c) % 2 == 1));
            }
        }
    }

    #[test]
    fn complement_involution() {
        let plane = BitPlane::new(2, 2, vec![1, 0, 0, 1]).unwrap();
        assert_eq!(plane.complement().complement(), plane);
    }
}
