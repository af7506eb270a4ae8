//! Orthonormal 2-D DCT-II transforms for 8x8 and 16x16 blocks, image tiling,
//! and the exact conversion between a 16x16 DCT block and the DCTs of its
//! four 8x8 sub-blocks.
//!
//! All arithmetic is in f64; quantization back to 8-bit happens only in
//! [`untile`]. Spatial samples enter the transform unshifted (no -128
//! centering): the watermark path only ever manipulates mid-frequency
//! coefficient differences, which are shift-invariant.

use crate::error::{Error, Result};
use crate::plane::GrayImage;

/// Square block of DCT coefficients. `coeffs[r][c]` uses 0-based storage;
/// the conventional 1-based coefficient names map as A_{1,3} = `at(0, 2)`
/// with (1,1) = `at(0, 0)` = DC.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffBlock {
    n: usize,
    coeffs: Vec<f64>,
}

impl CoeffBlock {
    pub fn zeros(n: usize) -> Result<Self> {
        check_block_size(n)?;
        Ok(Self {
            n,
            coeffs: vec![0.0; n * n],
        })
    }

    pub fn from_rows(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_block_size(n)?;
        if coeffs.len() != n * n {
            return Err(Error::InvalidParam(format!(
                "coefficient buffer length {} does not match {n}x{n}",
                coeffs.len()
            )));
        }
        Ok(Self { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.coeffs[row * self.n + col]
    }

    #[inline]
    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut f64 {
        &mut self.coeffs[row * self.n + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.coeffs
    }
}

fn check_block_size(n: usize) -> Result<()> {
    if n == 8 || n == 16 {
        Ok(())
    } else {
        Err(Error::BadBlockSize(n))
    }
}

/// Orthonormal DCT-II basis matrix: row k is the k-th basis vector, so the
/// forward 2-D transform is `D X D^T` and the inverse is `D^T C D`.
fn basis(n: usize) -> Vec<f64> {
    let mut d = vec![0.0; n * n];
    let norm0 = 1.0 / (n as f64).sqrt();
    let norm = (2.0 / n as f64).sqrt();
    for k in 0..n {
        for i in 0..n {
            d[k * n + i] = if k == 0 {
                norm0
            } else {
                norm * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64)
                    .cos()
            };
        }
    }
    d
}

fn basis_for(n: usize) -> &'static [f64] {
    use std::sync::OnceLock;
    static D8: OnceLock<Vec<f64>> = OnceLock::new();
    static D16: OnceLock<Vec<f64>> = OnceLock::new();
    match n {
        8 => D8.get_or_init(|| basis(8)),
        16 => D16.get_or_init(|| basis(16)),
        _ => unreachable!("block size validated earlier"),
    }
}

/// out = a * b where all are n x n row-major; `transpose_b` multiplies by b^T.
fn matmul(n: usize, a: &[f64], b: &[f64], transpose_b: bool, out: &mut [f64]) {
    for r in 0..n {
        for c in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                let bv = if transpose_b { b[c * n + k] } else { b[k * n + c] };
                acc += a[r * n + k] * bv;
            }
            out[r * n + c] = acc;
        }
    }
}

/// Forward orthonormal 2-D DCT-II of an n x n spatial block (n in {8,16}).
pub fn dct2(samples: &[f64], n: usize) -> Result<CoeffBlock> {
    check_block_size(n)?;
    if samples.len() != n * n {
        return Err(Error::InvalidParam(format!(
            "sample buffer length {} does not match {n}x{n}",
            samples.len()
        )));
    }
    let d = basis_for(n);
    let mut tmp = vec![0.0; n * n];
    let mut out = vec![0.0; n * n];
    matmul(n, d, samples, false, &mut tmp); // D X
    matmul(n, &tmp, d, true, &mut out); // (D X) D^T
    Ok(CoeffBlock { n, coeffs: out })
}

/// Inverse of [`dct2`]; returns n x n spatial samples.
pub fn idct2(block: &CoeffBlock) -> Vec<f64> {
    let n = block.n;
    let d = basis_for(n);
    let mut tmp = vec![0.0; n * n];
    let mut out = vec![0.0; n * n];
    // D^T C
    for r in 0..n {
        for c in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += d[k * n + r] * block.coeffs[k * n + c];
            }
            tmp[r * n + c] = acc;
        }
    }
    matmul(n, &tmp, d, false, &mut out); // (D^T C) D
    out
}

/// Grid of uniformly sized coefficient blocks in raster order.
#[derive(Debug, Clone)]
pub struct BlockGrid {
    rows: usize,
    cols: usize,
    n: usize,
    blocks: Vec<CoeffBlock>,
}

impl BlockGrid {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn block(&self, row: usize, col: usize) -> &CoeffBlock {
        &self.blocks[row * self.cols + col]
    }

    #[inline]
    pub fn block_mut(&mut self, row: usize, col: usize) -> &mut CoeffBlock {
        &mut self.blocks[row * self.cols + col]
    }
}

/// Splits an image into non-overlapping n x n blocks and DCT-transforms each.
/// Errors when the dimensions are not multiples of n; never pads.
pub fn tile(img: &GrayImage, n: usize) -> Result<BlockGrid> {
    check_block_size(n)?;
    if !img.width().is_multiple_of(n) || !img.height().is_multiple_of(n) {
        return Err(Error::NotBlockAligned {
            width: img.width(),
            height: img.height(),
            block: n,
        });
    }
    let rows = img.height() / n;
    let cols = img.width() / n;
    let mut blocks = Vec::with_capacity(rows * cols);
    let mut spatial = vec![0.0; n * n];
    for br in 0..rows {
        for bc in 0..cols {
            for r in 0..n {
                for c in 0..n {
                    spatial[r * n + c] = f64::from(img.get(br * n + r, bc * n + c));
                }
            }
            blocks.push(dct2(&spatial, n)?);
        }
    }
    Ok(BlockGrid {
        rows,
        cols,
        n,
        blocks,
    })
}

/// Inverse of [`tile`]: inverse-transforms every block and reassembles the
/// image, rounding to nearest and clamping to [0,255].
pub fn untile(grid: &BlockGrid, width: usize, height: usize) -> Result<GrayImage> {
    let n = grid.n;
    if width != grid.cols * n || height != grid.rows * n {
        return Err(Error::NotBlockAligned {
            width,
            height,
            block: n,
        });
    }
    let mut samples = vec![0u8; width * height];
    for br in 0..grid.rows {
        for bc in 0..grid.cols {
            let spatial = idct2(grid.block(br, bc));
            for r in 0..n {
                for c in 0..n {
                    let v = spatial[r * n + c].round().clamp(0.0, 255.0);
                    samples[(br * n + r) * width + bc * n + c] = v as u8;
                }
            }
        }
    }
    GrayImage::new(width, height, samples)
}

/// Combines the DCTs of four 8x8 sub-blocks (a = top-left, b = top-right,
/// c = bottom-left, d = bottom-right) into the DCT of the assembled 16x16
/// block. Implemented as the exact composition IDCT8 / assemble / DCT16.
pub fn subblocks_to_layer16(
    a: &CoeffBlock,
    b: &CoeffBlock,
    c: &CoeffBlock,
    d: &CoeffBlock,
) -> Result<CoeffBlock> {
    for blk in [a, b, c, d] {
        if blk.n != 8 {
            return Err(Error::BadBlockSize(blk.n));
        }
    }
    let (sa, sb, sc, sd) = (idct2(a), idct2(b), idct2(c), idct2(d));
    let mut spatial = vec![0.0; 256];
    for r in 0..8 {
        for col in 0..8 {
            spatial[r * 16 + col] = sa[r * 8 + col];
            spatial[r * 16 + col + 8] = sb[r * 8 + col];
            spatial[(r + 8) * 16 + col] = sc[r * 8 + col];
            spatial[(r + 8) * 16 + col + 8] = sd[r * 8 + col];
        }
    }
    dct2(&spatial, 16)
}

/// Exact inverse of [`subblocks_to_layer16`].
pub fn layer16_to_subblocks(
    layer: &CoeffBlock,
) -> Result<(CoeffBlock, CoeffBlock, CoeffBlock, CoeffBlock)> {
    if layer.n != 16 {
        return Err(Error::BadBlockSize(layer.n));
    }
    let spatial = idct2(layer);
    let mut quad = [vec![0.0; 64], vec![0.0; 64], vec![0.0; 64], vec![0.0; 64]];
    for r in 0..8 {
        for c in 0..8 {
            quad[0][r * 8 + c] = spatial[r * 16 + c];
            quad[1][r * 8 + c] = spatial[r * 16 + c + 8];
            quad[2][r * 8 + c] = spatial[(r + 8) * 16 + c];
            quad[3][r * 8 + c] = spatial[(r + 8) * 16 + c + 8];
        }
    }
    Ok((
        dct2(&quad[0], 8)?,
        dct2(&quad[1], 8)?,
        dct2(&quad[2], 8)?,
        dct2(&quad[3], 8)?,
    ))
}

/// The reversible 16x16 matrix P relating the two layers:
/// `A = 1/2 P [[a, b], [c, d]] P^T`. Constructed from the orthonormal basis
/// matrices as `P = sqrt(2) * D16 * blockdiag(D8^T, D8^T)`; built only for
/// verification, the conversion itself goes through the spatial composition.
pub fn conversion_matrix() -> Vec<f64> {
    let d16 = basis_for(16);
    let d8 = basis_for(8);
    let mut p = vec![0.0; 256];
    let s = std::f64::consts::SQRT_2;
    for r in 0..16 {
        for c in 0..16 {
            // blockdiag(D8^T, D8^T)[k][c] = D8[c%8][k%8] within the same half
            let mut acc = 0.0;
            let half = c / 8;
            for k in 0..8 {
                let kk = half * 8 + k;
                acc += d16[r * 16 + kk] * d8[(c % 8) * 8 + k];
            }
            p[r * 16 + c] = s * acc;
        }
    }
    p
}

/// Applies `1/2 P [[a,b],[c,d]] P^T` directly; the verification oracle for
/// [`conversion_matrix`] against the composition path.
pub fn layer16_via_matrix(
    p: &[f64],
    a: &CoeffBlock,
    b: &CoeffBlock,
    c: &CoeffBlock,
    d: &CoeffBlock,
) -> CoeffBlock {
    let mut m = vec![0.0; 256];
    for r in 0..8 {
        for col in 0..8 {
            m[r * 16 + col] = a.at(r, col);
            m[r * 16 + col + 8] = b.at(r, col);
            m[(r + 8) * 16 + col] = c.at(r, col);
            m[(r + 8) * 16 + col + 8] = d.at(r, col);
        }
    }
    let mut tmp = vec![0.0; 256];
    let mut out = vec![0.0; 256];
    matmul(16, p, &m, false, &mut tmp);
    matmul(16, &tmp, p, true, &mut out);
    for v in &mut out {
        *v *= 0.5;
    }
    CoeffBlock {
        n: 16,
        coeffs: out,
    }
}

#[cfg(test)]
pub(crate) fn random_block(n: usize, seed: u64, scale: f64) -> CoeffBlock {
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
    let coeffs = (0..n * n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 * scale - scale
        })
        .collect();
    CoeffBlock { n, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn constant_block_dc() {
        let c = dct2(&[100.0; 64], 8).unwrap();
        assert!((c.at(0, 0) - 800.0).abs() < 1e-9);
        let ac_max = c
            .values()
            .iter()
            .skip(1)
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(ac_max < 1e-9);

        let c16 = dct2(&[7.5; 256], 16).unwrap();
        assert!((c16.at(0, 0) - 16.0 * 7.5).abs() < 1e-9);
    }

    #[test]
    fn dc_only_block_is_constant() {
        let mut c = CoeffBlock::zeros(8).unwrap();
        *c.at_mut(0, 0) = 800.0;
        let spatial = idct2(&c);
        for v in spatial {
            assert!((v - 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        for seed in 0..20 {
            for n in [8usize, 16] {
                let block = random_block(n, seed, 200.0);
                let spatial = idct2(&block);
                let back = dct2(&spatial, n).unwrap();
                assert!(max_abs_diff(block.values(), back.values()) < 1e-9);
                let e_coeff: f64 = block.values().iter().map(|v| v * v).sum();
                let e_spatial: f64 = spatial.iter().map(|v| v * v).sum();
                assert!((e_coeff - e_spatial).abs() / e_spatial.max(1.0) < 1e-6);
            }
        }
    }

    #[test]
    fn unsupported_block_size() {
        assert!(dct2(&[0.0; 16], 4).is_err());
    }

    #[test]
    fn tile_shapes() {
        let img = GrayImage::filled(512, 512, 128);
        let g16 = tile(&img, 16).unwrap();
        assert_eq!((g16.rows(), g16.cols()), (32, 32));
        let g8 = tile(&img, 8).unwrap();
        assert_eq!((g8.rows(), g8.cols()), (64, 64));
    }

    #[test]
    fn tile_rejects_non_multiple() {
        let img = GrayImage::filled(500, 512, 0);
        assert!(matches!(
            tile(&img, 16),
            Err(Error::NotBlockAligned { .. })
        ));
    }

    #[test]
    fn tile_untile_identity() {
        let samples: Vec<u8> = (0..64 * 64).map(|i| (i * 37 % 256) as u8).collect();
        let img = GrayImage::new(64, 64, samples).unwrap();
        for n in [8usize, 16] {
            let grid = tile(&img, n).unwrap();
            assert_eq!(untile(&grid, 64, 64).unwrap(), img);
        }
    }

    #[test]
    fn constant_subblocks_combine_to_doubled_dc() {
        // Four identical DC-only sub-blocks (spatial constant delta/8 each)
        // assemble to a 16x16 layer whose only nonzero coefficient is 2*delta.
        let delta = 123.0;
        let mut sub = CoeffBlock::zeros(8).unwrap();
        *sub.at_mut(0, 0) = delta;
        let layer = subblocks_to_layer16(&sub, &sub, &sub, &sub).unwrap();
        assert!((layer.at(0, 0) - 2.0 * delta).abs() < 1e-9);
        let rest: f64 = layer
            .values()
            .iter()
            .skip(1)
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(rest < 1e-9);
    }

    #[test]
    fn zero_inputs_zero_output() {
        let z = CoeffBlock::zeros(8).unwrap();
        let layer = subblocks_to_layer16(&z, &z, &z, &z).unwrap();
        assert!(layer.values().iter().all(|v| v.abs() < 1e-12));
        let (a, b, c, d) = layer16_to_subblocks(&CoeffBlock::zeros(16).unwrap()).unwrap();
        for blk in [a, b, c, d] {
            assert!(blk.values().iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn layer_conversion_round_trip() {
        for seed in 0..10 {
            let a = random_block(8, seed * 4, 150.0);
            let b = random_block(8, seed * 4 + 1, 150.0);
            let c = random_block(8, seed * 4 + 2, 150.0);
            let d = random_block(8, seed * 4 + 3, 150.0);
            let layer = subblocks_to_layer16(&a, &b, &c, &d).unwrap();
            let (a2, b2, c2, d2) = layer16_to_subblocks(&layer).unwrap();
            assert!(max_abs_diff(a.values(), a2.values()) < 1e-9);
            assert!(max_abs_diff(b.values(), b2.values()) < 1e-9);
            assert!(max_abs_diff(c.values(), c2.values()) < 1e-9);
            assert!(max_abs_diff(d.values(), d2.values()) < 1e-9);

            let layer2 = subblocks_to_layer16(&a2, &b2, &c2, &d2).unwrap();
            assert!(max_abs_diff(layer.values(), layer2.values()) < 1e-9);
        }
    }

    #[test]
    fn conversion_matrix_matches_composition() {
        let p = conversion_matrix();
        for seed in 0..50 {
            let a = random_block(8, seed * 4 + 100, 150.0);
            let b = random_block(8, seed * 4 + 101, 150.0);
            let c = random_block(8, seed * 4 + 102, 150.0);
            let d = random_block(8, seed * 4 + 103, 150.0);
            let via_matrix = layer16_via_matrix(&p, &a, &b, &c, &d);
            let via_composition = subblocks_to_layer16(&a, &b, &c, &d).unwrap();
            assert!(
                max_abs_diff(via_matrix.values(), via_composition.values()) < 1e-9,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn conversion_matrix_is_invertible() {
        // P = sqrt(2) * orthogonal, so P^-1 = P^T / 2; check P (P^T/2) = I.
        let p = conversion_matrix();
        for r in 0..16 {
            for c in 0..16 {
                let mut acc = 0.0;
                for k in 0..16 {
                    acc += p[r * 16 + k] * p[c * 16 + k];
                }
                let expected = if r == c { 2.0 } else { 0.0 };
                assert!((acc - expected).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn linearity_of_layer_conversion() {
        let a1 = random_block(8, 1, 100.0);
        let a2 = random_block(8, 2, 100.0);
        let b = random_block(8, 3, 100.0);
        let c = random_block(8, 4, 100.0);
        let d = random_block(8, 5, 100.0);
        let mut a_sum = a1.clone();
        for (i, v) in a_sum.coeffs.iter_mut().enumerate() {
            *v += a2.values()[i];
        }
        let f_sum = subblocks_to_layer16(&a_sum, &b, &c, &d).unwrap();
        let f1 = subblocks_to_layer16(&a1, &b, &c, &d).unwrap();
        let f2 = subblocks_to_layer16(&a2, &CoeffBlock::zeros(8).unwrap(), &CoeffBlock::zeros(8).unwrap(), &CoeffBlock::zeros(8).unwrap()).unwrap();
        let combined: Vec<f64> = f1
            .values()
            .iter()
            .zip(f2.values())
            .map(|(x, y)| x + y)
            .collect();
        assert!(max_abs_diff(f_sum.values(), &combined) < 1e-9);
    }

    #[test]
    fn independence_of_mid_pair() {
        // Perturbing any x_{1,3} or x_{3,1} leaves A_{1,3} and A_{3,1} unchanged.
        for seed in 0..10 {
            let blocks: Vec<CoeffBlock> =
                (0..4).map(|i| random_block(8, seed * 4 + i, 150.0)).collect();
            let layer = subblocks_to_layer16(&blocks[0], &blocks[1], &blocks[2], &blocks[3]).unwrap();
            for which in 0..4 {
                for &(r, c) in &[(0usize, 2usize), (2, 0)] {
                    let mut perturbed = blocks.clone();
                    *perturbed[which].at_mut(r, c) += 1234.5;
                    let layer2 = subblocks_to_layer16(
                        &perturbed[0],
                        &perturbed[1],
                        &perturbed[2],
                        &perturbed[3],
                    )
                    .unwrap();
                    assert!((layer.at(0, 2) - layer2.at(0, 2)).abs() < 1e-9);
                    assert!((layer.at(2, 0) - layer2.at(2, 0)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn spreading_into_eight_coefficients() {
        // Adding delta to A_{1,3} / A_{3,1} and converting down changes only
        // the eight x_{1,2} / x_{2,1} coefficients.
        for seed in 0..10 {
            let layer = random_block(16, seed + 77, 300.0);
            let base = layer16_to_subblocks(&layer).unwrap();
            let mut perturbed = layer.clone();
            *perturbed.at_mut(0, 2) += 55.5;
            *perturbed.at_mut(2, 0) += -41.25;
            let after = layer16_to_subblocks(&perturbed).unwrap();
            let pairs = [
                (&base.0, &after.0),
                (&base.1, &after.1),
                (&base.2, &after.2),
                (&base.3, &after.3),
            ];
            for (before, now) in pairs {
                for r in 0..8 {
                    for c in 0..8 {
                        let changed = (before.at(r, c) - now.at(r, c)).abs() > 1e-9;
                        let allowed = (r == 0 && c == 1) || (r == 1 && c == 0);
                        assert_eq!(changed, allowed, "seed {seed} pos ({r},{c})");
                    }
                }
            }
        }
    }
}
