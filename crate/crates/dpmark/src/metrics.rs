//! Quality metrics: PSNR between images and BER between bit planes.

use crate::error::Result;
use crate::plane::{BitPlane, GrayImage};

/// PSNR with a dedicated sentinel for the zero-MSE case. Reports print the
/// sentinel as the string `inf`, never a fake large number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Infinite,
    Db(f64),
}

impl Psnr {
    /// Finite dB value, or `None` for the infinite sentinel.
    pub fn db(&self) -> Option<f64> {
        match self {
            Psnr::Infinite => None,
            Psnr::Db(v) => Some(*v),
        }
    }
}

impl std::fmt::Display for Psnr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Psnr::Infinite => write!(f, "inf"),
            Psnr::Db(v) => write!(f, "{v:.2}"),
        }
    }
}

/// Peak signal-to-noise ratio, `10 log10(255^2 / MSE)`, peak fixed at 255.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<Psnr> {
    a.same_dims(b)?;
    let sum_sq: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = f64::from(x) - f64::from(y);
            d * d
        })
        .sum();
    if sum_sq == 0.0 {
        return Ok(Psnr::Infinite);
    }
    let mse = sum_sq / (a.width() * a.height()) as f64;
    Ok(Psnr::Db(10.0 * (255.0 * 255.0 / mse).log10()))
}

/// Bit error rate in percent: `100 * differing / total`.
pub fn ber(a: &BitPlane, b: &BitPlane) -> Result<f64> {
    a.same_dims(b)?;
    let differing = a
        .bits()
        .iter()
        .zip(b.bits())
        .filter(|(x, y)| x != y)
        .count();
    Ok(100.0 * differing as f64 / (a.width() * a.height()) as f64)
}
