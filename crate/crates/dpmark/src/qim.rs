//! Scalar quantization-index-modulation lattices.
//!
//! The host value is always a difference of two mid-frequency DCT
//! coefficients. Bits live on the binary lattice with step M: coset-1
//! centers are {M/4 + kM}, coset-0 centers are {-M/4 + kM}, so adjacent
//! opposite-coset centers sit M/2 apart and decoding tolerates any
//! distortion below M/4. Ternary symbols live on the uniform lattice {qN}
//! labeled by q mod 3 (0 -> 0, 1 -> +1, 2 -> -1), tolerating N/2.

use crate::error::{Error, Result};

fn check_strength(step: f64, name: &str) -> Result<()> {
    if step > 0.0 && step.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!(
            "{name} must be a positive real, got {step}"
        )))
    }
}

/// Nearest center of the bit's coset. |result - delta| <= M/2.
pub fn embed_binary(delta: f64, bit: u8, m: f64) -> Result<f64> {
    check_strength(m, "M")?;
    let offset = if bit == 1 { m / 4.0 } else { -m / 4.0 };
    let k = ((delta - offset) / m).round();
    Ok(offset + k * m)
}

/// Bit of the globally nearest center. Exact midpoints between the two
/// cosets resolve to bit 1 so extraction is deterministic.
pub fn extract_binary(delta: f64, m: f64) -> Result<u8> {
    check_strength(m, "M")?;
    let c1 = embed_binary(delta, 1, m)?;
    let c0 = embed_binary(delta, 0, m)?;
    Ok(u8::from((delta - c1).abs() <= (delta - c0).abs()))
}

fn symbol_residue(symbol: i8) -> Result<f64> {
    match symbol {
        0 => Ok(0.0),
        1 => Ok(1.0),
        -1 => Ok(2.0),
        other => Err(Error::InvalidParam(format!(
            "ternary symbol {other} outside {{-1,0,+1}}"
        ))),
    }
}

/// Nearest center q*N with q = symbol (mod 3). |result - delta| <= 3N/2.
pub fn embed_ternary(delta: f64, symbol: i8, n: f64) -> Result<f64> {
    check_strength(n, "N")?;
    let r = symbol_residue(symbol)?;
    let k = ((delta / n - r) / 3.0).round();
    Ok((3.0 * k + r) * n)
}

/// Symbol label of the nearest center; half-integer ties round toward
/// +infinity.
pub fn extract_ternary(delta: f64, n: f64) -> Result<i8> {
    check_strength(n, "N")?;
    let q = (delta / n + 0.5).floor() as i64;
    Ok(match q.rem_euclid(3) {
        0 => 0,
        1 => 1,
        _ => -1,
    })
}
