//! Deterministic, parameterized signal-processing attacks: JPEG
//! quantization, average/median/Gaussian filtering, Gaussian and
//! salt-and-pepper noise, and a down/up resize.
//!
//! Every attack preserves dimensions and the 8-bit range and is a pure
//! function of (input, parameters, seed). Stochastic attacks draw from a
//! seeded ChaCha8 stream so outputs are identical across runs, platforms
//! and thread counts.

use crate::dct::{dct2, idct2};
use crate::error::{Error, Result};
use crate::plane::GrayImage;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Standard JPEG luminance quantization table (row-major, row = vertical
/// frequency).
const STD_LUMA_QUANT: [u32; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// IJG quality scaling of the standard table.
fn scaled_quant_table(qf: u32) -> [u32; 64] {
    let scale = if qf < 50 { 5000 / qf } else { 200 - 2 * qf };
    let mut out = [0u32; 64];
    for (o, &q) in out.iter_mut().zip(&STD_LUMA_QUANT) {
        *o = ((q * scale + 50) / 100).clamp(1, 255);
    }
    out
}

/// JPEG luminance pipeline without the (lossless) entropy stage: per 8x8
/// block, level shift, DCT, quantize, dequantize, inverse DCT, shift back.
pub fn jpeg_attack(img: &GrayImage, qf: u32) -> Result<GrayImage> {
    if !(1..=100).contains(&qf) {
        return Err(Error::InvalidParam(format!(
            "JPEG quality factor {qf} outside 1..=100"
        )));
    }
    if !img.width().is_multiple_of(8) || !img.height().is_multiple_of(8) {
        return Err(Error::NotBlockAligned {
            width: img.width(),
            height: img.height(),
            block: 8,
        });
    }
    let table = scaled_quant_table(qf);
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0u8; w * h];
    let mut spatial = [0.0f64; 64];
    for br in (0..h).step_by(8) {
        for bc in (0..w).step_by(8) {
            for r in 0..8 {
                for c in 0..8 {
                    spatial[r * 8 + c] = f64::from(img.get(br + r, bc + c)) - 128.0;
                }
            }
            let mut coeffs = dct2(&spatial, 8)?;
            for (i, &q) in table.iter().enumerate() {
                let q = f64::from(q);
                let v = coeffs.at(i / 8, i % 8);
                *coeffs.at_mut(i / 8, i % 8) = (v / q).round() * q;
            }
            let back = idct2(&coeffs);
            for r in 0..8 {
                for c in 0..8 {
                    let v = (back[r * 8 + c] + 128.0).round().clamp(0.0, 255.0);
                    out[(br + r) * w + bc + c] = v as u8;
                }
            }
        }
    }
    GrayImage::new(w, h, out)
}

fn check_kernel_size(k: usize) -> Result<()> {
    if k % 2 == 1 && k >= 3 {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!(
            "filter size {k} must be an odd integer >= 3"
        )))
    }
}

#[inline]
fn clamped(img: &GrayImage, r: isize, c: isize) -> u8 {
    let r = r.clamp(0, img.height() as isize - 1) as usize;
    let c = c.clamp(0, img.width() as isize - 1) as usize;
    img.get(r, c)
}

/// k x k neighborhood mean with clamp-to-edge borders.
pub fn average_filter(img: &GrayImage, k: usize) -> Result<GrayImage> {
    check_kernel_size(k)?;
    let half = (k / 2) as isize;
    let area = (k * k) as f64;
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0u8; w * h];
    for r in 0..h as isize {
        for c in 0..w as isize {
            let mut sum = 0.0;
            for dr in -half..=half {
                for dc in -half..=half {
                    sum += f64::from(clamped(img, r + dr, c + dc));
                }
            }
            out[r as usize * w + c as usize] = (sum / area).round().clamp(0.0, 255.0) as u8;
        }
    }
    GrayImage::new(w, h, out)
}

/// k x k neighborhood median with clamp-to-edge borders.
pub fn median_filter(img: &GrayImage, k: usize) -> Result<GrayImage> {
    check_kernel_size(k)?;
    let half = (k / 2) as isize;
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0u8; w * h];
    let mut window = vec![0u8; k * k];
    for r in 0..h as isize {
        for c in 0..w as isize {
            let mut i = 0;
            for dr in -half..=half {
                for dc in -half..=half {
                    window[i] = clamped(img, r + dr, c + dc);
                    i += 1;
                }
            }
            window.sort_unstable();
            out[r as usize * w + c as usize] = window[k * k / 2];
        }
    }
    GrayImage::new(w, h, out)
}

/// k x k Gaussian smoothing; the sampled kernel is normalized to sum 1
/// before the single rounding at the output.
pub fn gaussian_filter(img: &GrayImage, k: usize, sigma: f64) -> Result<GrayImage> {
    check_kernel_size(k)?;
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidParam(format!(
            "gaussian sigma must be positive, got {sigma}"
        )));
    }
    let half = (k / 2) as isize;
    let mut kernel = vec![0.0f64; k * k];
    let mut sum = 0.0;
    for dr in -half..=half {
        for dc in -half..=half {
            let v = (-((dr * dr + dc * dc) as f64) / (2.0 * sigma * sigma)).exp();
            kernel[((dr + half) * k as isize + dc + half) as usize] = v;
            sum += v;
        }
    }
    for v in &mut kernel {
        *v /= sum;
    }
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0u8; w * h];
    for r in 0..h as isize {
        for c in 0..w as isize {
            let mut acc = 0.0;
            for dr in -half..=half {
                for dc in -half..=half {
                    acc += kernel[((dr + half) * k as isize + dc + half) as usize]
                        * f64::from(clamped(img, r + dr, c + dc));
                }
            }
            out[r as usize * w + c as usize] = acc.round().clamp(0.0, 255.0) as u8;
        }
    }
    GrayImage::new(w, h, out)
}

/// Adds zero-mean Gaussian noise with standard deviation 255*sqrt(variance)
/// in pixel units; `variance` is on the [0,1] intensity scale.
pub fn gaussian_noise(img: &GrayImage, variance: f64, seed: u64) -> Result<GrayImage> {
    if variance < 0.0 || !variance.is_finite() {
        return Err(Error::InvalidParam(format!(
            "noise variance must be >= 0, got {variance}"
        )));
    }
    if variance == 0.0 {
        return Ok(img.clone());
    }
    let sigma = 255.0 * variance.sqrt();
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidParam(format!("bad noise parameters: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = img
        .samples()
        .iter()
        .map(|&s| {
            let v = f64::from(s) + normal.sample(&mut rng);
            v.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayImage::new(img.width(), img.height(), samples)
}

/// Salt-and-pepper noise: floor(density/100 * pixels) distinct positions
/// chosen by a seeded shuffle; the first half become salt (255), the rest
/// including an odd remainder become pepper (0).
pub fn salt_pepper(img: &GrayImage, density_percent: f64, seed: u64) -> Result<GrayImage> {
    if !(0.0..=100.0).contains(&density_percent) {
        return Err(Error::InvalidParam(format!(
            "salt-and-pepper density {density_percent} outside 0..=100"
        )));
    }
    let total = img.width() * img.height();
    let count = (density_percent / 100.0 * total as f64).floor() as usize;
    let mut samples = img.samples().to_vec();
    if count == 0 {
        return GrayImage::new(img.width(), img.height(), samples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<u32> = (0..total as u32).collect();
    positions.shuffle(&mut rng);
    let salt = count / 2;
    for (i, &pos) in positions[..count].iter().enumerate() {
        samples[pos as usize] = if i < salt { 255 } else { 0 };
    }
    GrayImage::new(img.width(), img.height(), samples)
}

fn axis_weights(n_in: usize, n_out: usize) -> Vec<(usize, Vec<f64>)> {
    let scale = n_in as f64 / n_out as f64;
    let support = scale.max(1.0);
    let mut out = Vec::with_capacity(n_out);
    for o in 0..n_out {
        let center = (o as f64 + 0.5) * scale;
        let lo = (center - support).floor() as isize;
        let hi = (center + support).ceil() as isize;
        let mut idx_start = usize::MAX;
        let mut weights: Vec<f64> = Vec::new();
        for i in lo..=hi {
            let t = (i as f64 + 0.5 - center) / scale.max(1.0);
            let w = (1.0 - t.abs()).max(0.0);
            if w > 0.0 {
                // Out-of-range taps clamp to the border sample.
                let clamped_i = i.clamp(0, n_in as isize - 1) as usize;
                if idx_start == usize::MAX {
                    idx_start = clamped_i;
                }
                let offset = clamped_i - idx_start;
                if offset < weights.len() {
                    weights[offset] += w;
                } else {
                    weights.resize(offset, 0.0);
                    weights.push(w);
                }
            }
        }
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }
        out.push((idx_start, weights));
    }
    out
}

/// Separable triangle-filter (bilinear) resampler with support scaled by
/// the downscale ratio, the convention used by mainstream image libraries.
fn resample(values: &[f64], w_in: usize, h_in: usize, w_out: usize, h_out: usize) -> Vec<f64> {
    let wx = axis_weights(w_in, w_out);
    let mut horizontal = vec![0.0; h_in * w_out];
    for r in 0..h_in {
        for (o, (start, weights)) in wx.iter().enumerate() {
            let mut acc = 0.0;
            for (j, &wt) in weights.iter().enumerate() {
                let col = (start + j).min(w_in - 1);
                acc += wt * values[r * w_in + col];
            }
            horizontal[r * w_out + o] = acc;
        }
    }
    let wy = axis_weights(h_in, h_out);
    let mut out = vec![0.0; h_out * w_out];
    for (o, (start, weights)) in wy.iter().enumerate() {
        for c in 0..w_out {
            let mut acc = 0.0;
            for (j, &wt) in weights.iter().enumerate() {
                let row = (start + j).min(h_in - 1);
                acc += wt * horizontal[row * w_out + c];
            }
            out[o * w_out + c] = acc;
        }
    }
    out
}

/// Shrinks the image by `factor` with bilinear resampling, rounds the small
/// image to 8 bits, then scales back to the original size.
pub fn resize_attack(img: &GrayImage, factor: f64) -> Result<GrayImage> {
    if !(factor > 0.0 && factor <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "resize factor {factor} outside (0, 1]"
        )));
    }
    let (w, h) = (img.width(), img.height());
    let w2 = ((w as f64 * factor).round() as usize).max(1);
    let h2 = ((h as f64 * factor).round() as usize).max(1);
    if (w2, h2) == (w, h) {
        return Ok(img.clone());
    }
    let values: Vec<f64> = img.samples().iter().map(|&s| f64::from(s)).collect();
    let small = resample(&values, w, h, w2, h2);
    let back = resample(&small, w2, h2, w, h);
    let samples = back
        .iter()
        .map(|v| v.round().clamp(0.0, 255.0) as u8)
        .collect();
    GrayImage::new(w, h, samples)
}

/// Attack family tag plus parameters, as written on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum AttackKind {
    Jpeg { qf: u32 },
    Average { k: usize },
    Median { k: usize },
    Gaussian { k: usize, sigma: f64 },
    GaussianNoise { variance: f64 },
    SaltPepper { percent: f64 },
    Resize { factor: f64 },
}

/// A parsed attack specification; stochastic attacks carry an optional seed
/// (the benchmark derives one deterministically when absent).
#[derive(Debug, Clone, PartialEq)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub seed: Option<u64>,
}

impl AttackSpec {
    pub fn is_stochastic(&self) -> bool {
        matches!(
            self.kind,
            AttackKind::GaussianNoise { .. } | AttackKind::SaltPepper { .. }
        )
    }

    /// Parses specs like `jpeg:qf=30`, `avg:k=9`, `median:k=5`,
    /// `gauss:k=7,sigma=2.5`, `gnoise:var=1e-3,seed=7`,
    /// `spnoise:pct=1,seed=7`, `resize:f=0.4`.
    pub fn parse(spec: &str) -> Result<AttackSpec> {
        let bad = |reason: &str| Error::BadAttackSpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut params = std::collections::BTreeMap::new();
        if !rest.is_empty() {
            for pair in rest.split(',') {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| bad(&format!("parameter {pair:?} is not key=value")))?;
                params.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let mut seed = None;
        if let Some(s) = params.remove("seed") {
            seed = Some(
                s.parse::<u64>()
                    .map_err(|_| bad(&format!("seed {s:?} is not a 64-bit integer")))?,
            );
        }
        let get = |params: &std::collections::BTreeMap<String, String>, key: &str| {
            params
                .get(key)
                .cloned()
                .ok_or_else(|| bad(&format!("missing parameter {key:?}")))
        };
        let kind = match name {
            "jpeg" => AttackKind::Jpeg {
                qf: get(&params, "qf")?
                    .parse()
                    .map_err(|_| bad("qf must be an integer"))?,
            },
            "avg" => AttackKind::Average {
                k: get(&params, "k")?
                    .parse()
                    .map_err(|_| bad("k must be an integer"))?,
            },
            "median" => AttackKind::Median {
                k: get(&params, "k")?
                    .parse()
                    .map_err(|_| bad("k must be an integer"))?,
            },
            "gauss" => AttackKind::Gaussian {
                k: get(&params, "k")?
                    .parse()
                    .map_err(|_| bad("k must be an integer"))?,
                sigma: get(&params, "sigma")?
                    .parse()
                    .map_err(|_| bad("sigma must be a real"))?,
            },
            "gnoise" => AttackKind::GaussianNoise {
                variance: get(&params, "var")?
                    .parse()
                    .map_err(|_| bad("var must be a real"))?,
            },
            "spnoise" => AttackKind::SaltPepper {
                percent: get(&params, "pct")?
                    .parse()
                    .map_err(|_| bad("pct must be a real"))?,
            },
            "resize" => AttackKind::Resize {
                factor: get(&params, "f")?
                    .parse()
                    .map_err(|_| bad("f must be a real"))?,
            },
            other => return Err(bad(&format!("unknown attack kind {other:?}"))),
        };
        let known: &[&str] = match kind {
            AttackKind::Jpeg { .. } => &["qf"],
            AttackKind::Average { .. } | AttackKind::Median { .. } => &["k"],
            AttackKind::Gaussian { .. } => &["k", "sigma"],
            AttackKind::GaussianNoise { .. } => &["var"],
            AttackKind::SaltPepper { .. } => &["pct"],
            AttackKind::Resize { .. } => &["f"],
        };
        for key in params.keys() {
            if !known.contains(&key.as_str()) {
                return Err(bad(&format!("unknown parameter {key:?}")));
            }
        }
        Ok(AttackSpec { kind, seed })
    }

    /// Applies the attack. Stochastic kinds require a seed, either parsed
    /// from the spec or supplied by the caller.
    pub fn apply(&self, img: &GrayImage, fallback_seed: Option<u64>) -> Result<GrayImage> {
        let seed = self.seed.or(fallback_seed);
        match self.kind {
            AttackKind::Jpeg { qf } => jpeg_attack(img, qf),
            AttackKind::Average { k } => average_filter(img, k),
            AttackKind::Median { k } => median_filter(img, k),
            AttackKind::Gaussian { k, sigma } => gaussian_filter(img, k, sigma),
            AttackKind::GaussianNoise { variance } => {
                let seed = seed
                    .ok_or_else(|| Error::InvalidParam("gnoise requires a seed".into()))?;
                gaussian_noise(img, variance, seed)
            }
            AttackKind::SaltPepper { percent } => {
                let seed = seed
                    .ok_or_else(|| Error::InvalidParam("spnoise requires a seed".into()))?;
                salt_pepper(img, percent, seed)
            }
            AttackKind::Resize { factor } => resize_attack(img, factor),
        }
    }

    /// Kind tag used in reports (stable, machine-friendly).
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            AttackKind::Jpeg { .. } => "jpeg",
            AttackKind::Average { .. } => "avg",
            AttackKind::Median { .. } => "median",
            AttackKind::Gaussian { .. } => "gauss",
            AttackKind::GaussianNoise { .. } => "gnoise",
            AttackKind::SaltPepper { .. } => "spnoise",
            AttackKind::Resize { .. } => "resize",
        }
    }

    /// Parameter string used in reports, without the seed.
    pub fn param_string(&self) -> String {
        match self.kind {
            AttackKind::Jpeg { qf } => format!("qf={qf}"),
            AttackKind::Average { k } | AttackKind::Median { k } => format!("k={k}"),
            AttackKind::Gaussian { k, sigma } => format!("k={k},sigma={sigma}"),
            AttackKind::GaussianNoise { variance } => format!("var={variance}"),
            AttackKind::SaltPepper { percent } => format!("pct={percent}"),
            AttackKind::Resize { factor } => format!("f={factor}"),
        }
    }
}
