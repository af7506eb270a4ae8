//! Logo partitioning into a critical base part and a less critical
//! enhancement part, with exact reconstruction and a brute-force
//! error-propagation analyzer.
//!
//! Three methods are provided:
//! - truncated SVD: rank-p approximation as the base, residual as the
//!   enhancement (real-valued parts, unbounded alphabet);
//! - blockwise 4x4 binary wavelet over GF(2): LL sub-band as the base,
//!   {LH, HL, HH} as the enhancement (binary alphabet);
//! - spatial scalability: top-left 2x decimation as the base,
//!   difference to the nearest-neighbor upsample as the enhancement
//!   (ternary alphabet, no error propagation).

use crate::error::{Error, Result};
use crate::plane::{BitPlane, RealPlane, TernaryPlane};
use nalgebra::DMatrix;

/// 4x4 binary matrix applied blockwise over GF(2), validated invertible at
/// construction. The validity check computes the exact integer determinant;
/// an even determinant means the matrix is singular mod 2 and is rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveletKernel {
    matrix: [[u8; 4]; 4],
    inverse: [[u8; 4]; 4],
}

/// Default kernel: invertible over GF(2) (integer determinant 3) and its own
/// GF(2) inverse, so forward and inverse tile transforms coincide.
pub const DEFAULT_WAVELET_MATRIX: [[u8; 4]; 4] = [
    [1, 1, 1, 0],
    [1, 0, 1, 1],
    [1, 1, 0, 1],
    [0, 1, 1, 1],
];

impl WaveletKernel {
    pub fn new(matrix: [[u8; 4]; 4]) -> Result<Self> {
        for row in &matrix {
            for &v in row {
                if v > 1 {
                    return Err(Error::InvalidParam(format!(
                        "wavelet kernel entry {v} outside {{0,1}}"
                    )));
                }
            }
        }
        let det = integer_det4(&matrix);
        if det % 2 == 0 {
            return Err(Error::SingularKernel { det });
        }
        let inverse = gf2_inverse4(&matrix)
            .expect("odd integer determinant implies GF(2) invertibility");
        Ok(Self { matrix, inverse })
    }

    pub fn matrix(&self) -> &[[u8; 4]; 4] {
        &self.matrix
    }

    /// Exact integer determinant of the candidate matrix (parity decides
    /// GF(2) invertibility).
    pub fn integer_determinant(matrix: &[[u8; 4]; 4]) -> i64 {
        integer_det4(matrix)
    }
}

impl Default for WaveletKernel {
    fn default() -> Self {
        WaveletKernel::new(DEFAULT_WAVELET_MATRIX).expect("default kernel is invertible")
    }
}

fn integer_det4(m: &[[u8; 4]; 4]) -> i64 {
    fn det3(m: [[i64; 3]; 3]) -> i64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
    let mut det = 0i64;
    for col in 0..4 {
        let mut minor = [[0i64; 3]; 3];
        for r in 1..4 {
            let mut cc = 0;
            for c in 0..4 {
                if c == col {
                    continue;
                }
                minor[r - 1][cc] = i64::from(m[r][c]);
                cc += 1;
            }
        }
        let sign = if col % 2 == 0 { 1 } else { -1 };
        det += sign * i64::from(m[0][col]) * det3(minor);
    }
    det
}

fn gf2_inverse4(m: &[[u8; 4]; 4]) -> Option<[[u8; 4]; 4]> {
    // Gauss-Jordan over GF(2) on [m | I].
    let mut a = *m;
    let mut inv = [[0u8; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1;
    }
    for col in 0..4 {
        let pivot = (col..4).find(|&r| a[r][col] == 1)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        for r in 0..4 {
            if r != col && a[r][col] == 1 {
                for c in 0..4 {
                    a[r][c] ^= a[col][c];
                    inv[r][c] ^= inv[col][c];
                }
            }
        }
    }
    Some(inv)
}

/// T * X * T^T over GF(2) for 4x4 tiles.
fn gf2_sandwich(t: &[[u8; 4]; 4], x: &[[u8; 4]; 4]) -> [[u8; 4]; 4] {
    let mut tx = [[0u8; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = 0u8;
            for k in 0..4 {
                acc ^= t[r][k] & x[k][c];
            }
            tx[r][c] = acc;
        }
    }
    let mut out = [[0u8; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = 0u8;
            for k in 0..4 {
                acc ^= tx[r][k] & t[c][k];
            }
            out[r][c] = acc;
        }
    }
    out
}

/// Partitioning method selector.
#[derive(Debug, Clone, PartialEq)]
pub enum PartitionMethod {
    TruncatedSvd { rank: usize },
    BinaryWavelet { kernel: WaveletKernel },
    SpatialScalability,
}

/// A partitioned logo: the method, its parts, and the alphabet size K of
/// each part (number of distinct values the embedder would have to encode).
#[derive(Debug, Clone)]
pub enum Partitioned {
    Svd {
        rank: usize,
        base: RealPlane,
        enhancement: RealPlane,
    },
    BinaryWavelet {
        kernel: WaveletKernel,
        /// LL sub-band, half resolution.
        base: BitPlane,
        /// LH, HL, HH sub-bands, each half resolution.
        enhancement: [BitPlane; 3],
    },
    Spatial {
        base: BitPlane,
        enhancement: TernaryPlane,
    },
}

impl Partitioned {
    /// Alphabet sizes (K_base, K_enhancement).
    pub fn alphabet_sizes(&self) -> (usize, usize) {
        match self {
            Partitioned::Svd {
                base, enhancement, ..
            } => (base.alphabet_size(), enhancement.alphabet_size()),
            Partitioned::BinaryWavelet { .. } => (2, 2),
            Partitioned::Spatial { .. } => (2, 3),
        }
    }
}

/// Truncated-SVD partition: base = rank-p reconstruction, enhancement =
/// logo - base. Exact in real arithmetic, <= 1e-9 numerically.
pub fn split_svd(logo: &BitPlane, rank: usize) -> Result<Partitioned> {
    let (w, h) = (logo.width(), logo.height());
    let max_rank = w.min(h);
    if rank == 0 || rank > max_rank {
        return Err(Error::RankOutOfRange {
            rank,
            max: max_rank,
        });
    }
    let x = DMatrix::from_fn(h, w, |r, c| f64::from(logo.get(r, c)));
    let svd = x.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested V^T");
    // Keep the largest `rank` singular values (ties: first in sorted order).
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut base = DMatrix::zeros(h, w);
    for &k in order.iter().take(rank) {
        let sigma = svd.singular_values[k];
        let uk = u.column(k);
        let vk = vt.row(k);
        for r in 0..h {
            for c in 0..w {
                base[(r, c)] += sigma * uk[r] * vk[c];
            }
        }
    }
    let mut base_vals = Vec::with_capacity(w * h);
    let mut enh_vals = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            base_vals.push(base[(r, c)]);
            enh_vals.push(x[(r, c)] - base[(r, c)]);
        }
    }
    Ok(Partitioned::Svd {
        rank,
        base: RealPlane::new(w, h, base_vals)?,
        enhancement: RealPlane::new(w, h, enh_vals)?,
    })
}

/// Blockwise binary wavelet partition: per 4x4 tile, B = T X T^T over GF(2),
/// rearranged into four half-resolution sub-bands (LL = rows 0-1 x cols 0-1
/// of each coefficient tile, then LH, HL, HH).
pub fn split_bwd(logo: &BitPlane, kernel: &WaveletKernel) -> Result<Partitioned> {
    let (w, h) = (logo.width(), logo.height());
    if w % 4 != 0 || h % 4 != 0 {
        return Err(Error::NotBlockAligned {
            width: w,
            height: h,
            block: 4,
        });
    }
    let (hw, hh) = (w / 2, h / 2);
    let mut bands = [
        BitPlane::zeros(hw, hh),
        BitPlane::zeros(hw, hh),
        BitPlane::zeros(hw, hh),
        BitPlane::zeros(hw, hh),
    ];
    for tr in (0..h).step_by(4) {
        for tc in (0..w).step_by(4) {
            let mut x = [[0u8; 4]; 4];
            for r in 0..4 {
                for c in 0..4 {
                    x[r][c] = logo.get(tr + r, tc + c);
                }
            }
            let b = gf2_sandwich(&kernel.matrix, &x);
            for r in 0..2 {
                for c in 0..2 {
                    let (br, bc) = (tr / 2 + r, tc / 2 + c);
                    bands[0].set(br, bc, b[r][c]); // LL
                    bands[1].set(br, bc, b[r][c + 2]); // LH
                    bands[2].set(br, bc, b[r + 2][c]); // HL
                    bands[3].set(br, bc, b[r + 2][c + 2]); // HH
                }
            }
        }
    }
    let [ll, lh, hl, hh] = bands;
    Ok(Partitioned::BinaryWavelet {
        kernel: kernel.clone(),
        base: ll,
        enhancement: [lh, hl, hh],
    })
}

/// Spatial-scalability partition: base(i,j) = logo(2i,2j); enhancement =
/// logo - nearest-neighbor upsample of the base, always in {-1,0,+1} and
/// zero at the decimated positions.
pub fn split_spatial(logo: &BitPlane) -> Result<Partitioned> {
    let (w, h) = (logo.width(), logo.height());
    if w % 2 != 0 || h % 2 != 0 {
        return Err(Error::NotBlockAligned {
            width: w,
            height: h,
            block: 2,
        });
    }
    let mut base = BitPlane::zeros(w / 2, h / 2);
    for r in 0..h / 2 {
        for c in 0..w / 2 {
            base.set(r, c, logo.get(2 * r, 2 * c));
        }
    }
    let up = upsample2(&base);
    let mut enhancement = TernaryPlane::zeros(w, h);
    for r in 0..h {
        for c in 0..w {
            enhancement.set(r, c, logo.get(r, c) as i8 - up.get(r, c) as i8);
        }
    }
    Ok(Partitioned::Spatial { base, enhancement })
}

/// Nearest-neighbor 2x upsample.
pub fn upsample2(base: &BitPlane) -> BitPlane {
    let mut out = BitPlane::zeros(base.width() * 2, base.height() * 2);
    for r in 0..out.height() {
        for c in 0..out.width() {
            out.set(r, c, base.get(r / 2, c / 2));
        }
    }
    out
}

/// Reconstructs the logo from its parts. Exact inverse of the corresponding
/// split on clean inputs; on corrupted inputs out-of-range sums clamp to
/// {0,1} and the SVD path re-binarizes at threshold 0.5.
pub fn reconstruct(parts: &Partitioned) -> Result<BitPlane> {
    match parts {
        Partitioned::Svd {
            base, enhancement, ..
        } => {
            if base.width() != enhancement.width() || base.height() != enhancement.height() {
                return Err(Error::DimensionMismatch {
                    a_width: base.width(),
                    a_height: base.height(),
                    b_width: enhancement.width(),
                    b_height: enhancement.height(),
                });
            }
            let (w, h) = (base.width(), base.height());
            let bits = (0..w * h)
                .map(|i| u8::from(base.values()[i] + enhancement.values()[i] >= 0.5))
                .collect();
            BitPlane::new(w, h, bits)
        }
        Partitioned::BinaryWavelet {
            kernel,
            base,
            enhancement,
        } => {
            let (hw, hh) = (base.width(), base.height());
            for band in enhancement {
                if band.width() != hw || band.height() != hh {
                    return Err(Error::DimensionMismatch {
                        a_width: hw,
                        a_height: hh,
                        b_width: band.width(),
                        b_height: band.height(),
                    });
                }
            }
            let mut logo = BitPlane::zeros(hw * 2, hh * 2);
            for tr in (0..hh * 2).step_by(4) {
                for tc in (0..hw * 2).step_by(4) {
                    let mut b = [[0u8; 4]; 4];
                    for r in 0..2 {
                        for c in 0..2 {
                            let (br, bc) = (tr / 2 + r, tc / 2 + c);
                            b[r][c] = base.get(br, bc);
                            b[r][c + 2] = enhancement[0].get(br, bc);
                            b[r + 2][c] = enhancement[1].get(br, bc);
                            b[r + 2][c + 2] = enhancement[2].get(br, bc);
                        }
                    }
                    let x = gf2_sandwich(&kernel.inverse, &b);
                    for r in 0..4 {
                        for c in 0..4 {
                            logo.set(tr + r, tc + c, x[r][c]);
                        }
                    }
                }
            }
            Ok(logo)
        }
        Partitioned::Spatial { base, enhancement } => {
            if enhancement.width() != base.width() * 2
                || enhancement.height() != base.height() * 2
            {
                return Err(Error::DimensionMismatch {
                    a_width: base.width() * 2,
                    a_height: base.height() * 2,
                    b_width: enhancement.width(),
                    b_height: enhancement.height(),
                });
            }
            let (w, h) = (enhancement.width(), enhancement.height());
            let mut bits = Vec::with_capacity(w * h);
            for r in 0..h {
                for c in 0..w {
                    let sum = base.get(r / 2, c / 2) as i8 + enhancement.get(r, c);
                    bits.push(sum.clamp(0, 1) as u8);
                }
            }
            BitPlane::new(w, h, bits)
        }
    }
}

/// Result of the exhaustive single-error analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationReport {
    /// Mean number of reconstructed-logo bits corrupted per single error in
    /// the enhancement/coefficient plane.
    pub mean_bits_per_error: f64,
    /// Number of positions flipped in the exhaustive sweep.
    pub positions: usize,
    /// Spatial scalability only: mean number of reconstruction bits changed
    /// per flipped base bit (the 2x2 footprint, moderated by the
    /// enhancement correction).
    pub base_mean: Option<f64>,
}

/// Brute-force error propagation: corrupt every position of the transmitted
/// enhancement/coefficient representation, reconstruct, and count bits that
/// differ from the clean reconstruction.
///
/// For the binary wavelet the corruption is a bit flip over the whole
/// re-arranged coefficient plane (all four sub-bands). For spatial
/// scalability and SVD the enhancement entry is replaced by the value that
/// lands on the complemented bit, the minimal single-position symbol error
/// that is actually effective.
pub fn error_propagation(method: &PartitionMethod, logo: &BitPlane) -> Result<PropagationReport> {
    match method {
        PartitionMethod::SpatialScalability => {
            let parts = split_spatial(logo)?;
            let clean = reconstruct(&parts)?;
            let (base, enhancement) = match &parts {
                Partitioned::Spatial { base, enhancement } => (base, enhancement),
                _ => unreachable!(),
            };
            let (w, h) = (enhancement.width(), enhancement.height());
            let mut total = 0usize;
            for r in 0..h {
                for c in 0..w {
                    let up = base.get(r / 2, c / 2) as i8;
                    let flipped_bit = clean.get(r, c) ^ 1;
                    let corrupted_symbol = flipped_bit as i8 - up;
                    let mut enh = enhancement.clone();
                    enh.set(r, c, corrupted_symbol);
                    let recon = reconstruct(&Partitioned::Spatial {
                        base: base.clone(),
                        enhancement: enh,
                    })?;
                    total += count_diff(&clean, &recon);
                }
            }
            // Base flips reported separately: the nearest-neighbor footprint
            // is 2x2 but the enhancement correction masks detail positions.
            let mut base_total = 0usize;
            for r in 0..base.height() {
                for c in 0..base.width() {
                    let mut b = base.clone();
                    b.set(r, c, base.get(r, c) ^ 1);
                    let recon = reconstruct(&Partitioned::Spatial {
                        base: b,
                        enhancement: enhancement.clone(),
                    })?;
                    base_total += count_diff(&clean, &recon);
                }
            }
            Ok(PropagationReport {
                mean_bits_per_error: total as f64 / (w * h) as f64,
                positions: w * h,
                base_mean: Some(base_total as f64 / (base.width() * base.height()) as f64),
            })
        }
        PartitionMethod::BinaryWavelet { kernel } => {
            let parts = split_bwd(logo, kernel)?;
            let clean = reconstruct(&parts)?;
            let (base, enhancement) = match &parts {
                Partitioned::BinaryWavelet {
                    base, enhancement, ..
                } => (base, enhancement),
                _ => unreachable!(),
            };
            let mut total = 0usize;
            let mut positions = 0usize;
            for band_idx in 0..4 {
                let (hw, hh) = (base.width(), base.height());
                for r in 0..hh {
                    for c in 0..hw {
                        let mut b = base.clone();
                        let mut e = enhancement.clone();
                        match band_idx {
                            0 => b.set(r, c, b.get(r, c) ^ 1),
                            k => {
                                let band = &mut e[k - 1];
                                band.set(r, c, band.get(r, c) ^ 1);
                            }
                        }
                        let recon = reconstruct(&Partitioned::BinaryWavelet {
                            kernel: kernel.clone(),
                            base: b,
                            enhancement: e,
                        })?;
                        total += count_diff(&clean, &recon);
                        positions += 1;
                    }
                }
            }
            Ok(PropagationReport {
                mean_bits_per_error: total as f64 / positions as f64,
                positions,
                base_mean: None,
            })
        }
        PartitionMethod::TruncatedSvd { rank } => {
            let parts = split_svd(logo, *rank)?;
            let clean = reconstruct(&parts)?;
            let (base, enhancement) = match &parts {
                Partitioned::Svd {
                    base, enhancement, ..
                } => (base, enhancement),
                _ => unreachable!(),
            };
            let (w, h) = (enhancement.width(), enhancement.height());
            let mut total = 0usize;
            for r in 0..h {
                for c in 0..w {
                    let flipped_bit = clean.get(r, c) ^ 1;
                    let corrupted = f64::from(flipped_bit) - base.get(r, c);
                    let mut vals = enhancement.values().to_vec();
                    vals[r * w + c] = corrupted;
                    let recon = reconstruct(&Partitioned::Svd {
                        rank: *rank,
                        base: base.clone(),
                        enhancement: RealPlane::new(w, h, vals)?,
                    })?;
                    total += count_diff(&clean, &recon);
                }
            }
            Ok(PropagationReport {
                mean_bits_per_error: total as f64 / (w * h) as f64,
                positions: w * h,
                base_mean: None,
            })
        }
    }
}

fn count_diff(a: &BitPlane, b: &BitPlane) -> usize {
    a.bits()
        .iter()
        .zip(b.bits())
        .filter(|(x, y)| x != y)
        .count()
}
