//! Deterministic synthetic test content: textured grayscale covers with
//! natural-image-like (roughly 1/f) spectra and a structured binary demo
//! logo. Everything derives from ChaCha8 streams, so the same seed yields
//! the same image on every platform; the benchmark and test suites use
//! these as a stand-in for a photo collection.

use crate::plane::{BitPlane, GrayImage};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Separable Gaussian blur on an f64 field, clamp-to-edge borders.
fn blur_field(values: &[f64], w: usize, h: usize, sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut kernel = Vec::with_capacity((2 * radius + 1) as usize);
    let mut sum = 0.0;
    for i in -radius..=radius {
        let v = (-(i * i) as f64 / (2.0 * sigma * sigma)).exp();
        kernel.push(v);
        sum += v;
    }
    for v in &mut kernel {
        *v /= sum;
    }
    let mut tmp = vec![0.0; w * h];
    for r in 0..h {
        for c in 0..w as isize {
            let mut acc = 0.0;
            for (j, &kv) in kernel.iter().enumerate() {
                let cc = (c + j as isize - radius).clamp(0, w as isize - 1) as usize;
                acc += kv * values[r * w + cc];
            }
            tmp[r * w + c as usize] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for r in 0..h as isize {
        for c in 0..w {
            let mut acc = 0.0;
            for (j, &kv) in kernel.iter().enumerate() {
                let rr = (r + j as isize - radius).clamp(0, h as isize - 1) as usize;
                acc += kv * tmp[rr * w + c];
            }
            out[r as usize * w + c] = acc;
        }
    }
    out
}

fn normalized_noise_layer(rng: &mut ChaCha8Rng, w: usize, h: usize, sigma_blur: f64) -> Vec<f64> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let white: Vec<f64> = (0..w * h).map(|_| normal.sample(rng)).collect();
    let blurred = blur_field(&white, w, h, sigma_blur);
    let mean = blurred.iter().sum::<f64>() / blurred.len() as f64;
    let var = blurred.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / blurred.len() as f64;
    let std = var.sqrt().max(1e-12);
    blurred.iter().map(|v| (v - mean) / std).collect()
}

/// Blur scale / amplitude pairs of the multi-octave texture. Chosen so the
/// covers carry photo-like energy across the coarse-to-fine bands without
/// overwhelming broadband noise.
const OCTAVES: [(f64, f64); 4] = [(16.0, 22.0), (8.0, 11.0), (4.0, 2.75), (2.0, 3.25)];

/// Deterministic textured cover image. Large-scale gradient and blobs plus
/// multi-octave filtered noise, clamped to 8 bits.
pub fn textured_image(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (width, height);
    let mut field = vec![0.0f64; w * h];

    let fx = rng.gen_range(0.3..1.2);
    let fy = rng.gen_range(0.3..1.2);
    for r in 0..h {
        for c in 0..w {
            let x = c as f64 / w as f64;
            let y = r as f64 / h as f64;
            field[r * w + c] = 120.0
                + 50.0
                    * (2.0 * std::f64::consts::PI * x * fx).sin()
                    * (2.0 * std::f64::consts::PI * y * fy).cos();
        }
    }

    for _ in 0..8 {
        let cx = rng.gen_range(0.0..w as f64);
        let cy = rng.gen_range(0.0..h as f64);
        let spread = rng.gen_range(40.0..150.0);
        let amp = rng.gen_range(-60.0..60.0);
        for r in 0..h {
            for c in 0..w {
                let dx = c as f64 - cx;
                let dy = r as f64 - cy;
                field[r * w + c] += amp * (-(dx * dx + dy * dy) / (2.0 * spread * spread)).exp();
            }
        }
    }

    for (sigma, amp) in OCTAVES {
        let layer = normalized_noise_layer(&mut rng, w, h, sigma);
        for (f, l) in field.iter_mut().zip(&layer) {
            *f += amp * l;
        }
    }

    let samples = field
        .iter()
        .map(|v| v.round().clamp(0.0, 255.0) as u8)
        .collect();
    GrayImage::new(w, h, samples).expect("matching buffer size")
}

/// 64x64 structured binary logo: glyph-like bars, a diagonal stroke, and
/// speckle detail, so both the half-resolution base part and the ternary
/// enhancement part carry real information.
pub fn demo_logo() -> BitPlane {
    let mut logo = BitPlane::zeros(64, 64);
    let mut fill = |r0: usize, r1: usize, c0: usize, c1: usize| {
        for r in r0..r1 {
            for c in c0..c1 {
                logo.set(r, c, 1);
            }
        }
    };
    fill(9, 55, 11, 17);
    fill(9, 15, 11, 41);
    fill(29, 35, 11, 35);
    fill(49, 55, 11, 45);
    for k in 0..64 {
        let c = (40 + k / 3).min(63);
        if k >= 1 {
            logo.set(k - 1, c - 1, 1);
            logo.set(k - 1, c, 1);
        }
        logo.set(k, c - 1, 1);
        logo.set(k, c, 1);
    }
    // Speckle detail from a blurred noise threshold.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let white: Vec<f64> = (0..64 * 64).map(|_| normal.sample(&mut rng)).collect();
    let blurred = blur_field(&white, 64, 64, 1.6);
    let mean = blurred.iter().sum::<f64>() / blurred.len() as f64;
    let var =
        blurred.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / blurred.len() as f64;
    let std = var.sqrt();
    for r in 0..64 {
        for c in 0..64 {
            if (blurred[r * 64 + c] - mean) / std > 1.4 {
                logo.set(r, c, 1);
            }
        }
    }
    logo
}
