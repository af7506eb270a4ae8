//! Benchmark harness: embed, attack, extract, measure over an image set,
//! with CSV and markdown reports.
//!
//! Runs are deterministic: stochastic attacks that carry no explicit seed
//! get one derived from the suite seed, the image index and the attack
//! index, so re-running the same configuration yields byte-identical CSV.

use crate::attack::AttackSpec;
use crate::error::{Error, Result};
use crate::metrics::{ber, psnr, Psnr};
use crate::pgm;
use crate::plane::{binarize, BitPlane, GrayImage};
use crate::watermark::{
    embed_dp, embed_normal, extract_dp, extract_normal, DpParams, Method, NormalParams,
};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Full description of a benchmark run.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub images_dir: PathBuf,
    pub logo_path: PathBuf,
    pub methods: Vec<Method>,
    pub dp: DpParams,
    pub normal: NormalParams,
    pub attacks: Vec<AttackSpec>,
    pub seed: u64,
    pub out_csv: Option<PathBuf>,
    pub out_md: Option<PathBuf>,
    /// When set, the JPEG mean-BER curve (param, method, mean_ber) is
    /// written here for external plotting.
    pub out_curve: Option<PathBuf>,
}

impl BenchConfig {
    /// Parses a plain `key = value` config file. Recognized keys:
    /// `images`, `logo`, `methods`, `dp_m`, `dp_n`, `normal_m`, `attacks`
    /// (comma-separated spec list), `seed`, `out_csv`, `out_md`.
    /// Lines starting with `#` are comments.
    pub fn from_file(path: &Path) -> Result<BenchConfig> {
        let text = std::fs::read_to_string(path)?;
        let mut config = BenchConfig {
            images_dir: PathBuf::new(),
            logo_path: PathBuf::new(),
            methods: vec![Method::Dp, Method::Normal],
            dp: DpParams::DEFAULT,
            normal: NormalParams::DEFAULT,
            attacks: Vec::new(),
            seed: 0,
            out_csv: None,
            out_md: None,
            out_curve: None,
        };
        let mut saw_images = false;
        let mut saw_logo = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::BadConfig(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let parse_f64 = |v: &str, k: &str| {
                v.parse::<f64>()
                    .map_err(|_| Error::BadConfig(format!("{k} must be a real, got {v:?}")))
            };
            match key {
                "images" => {
                    config.images_dir = PathBuf::from(value);
                    saw_images = true;
                }
                "logo" => {
                    config.logo_path = PathBuf::from(value);
                    saw_logo = true;
                }
                "methods" => {
                    config.methods = value
                        .split(',')
                        .map(|m| match m.trim() {
                            "dp" => Ok(Method::Dp),
                            "normal" => Ok(Method::Normal),
                            other => {
                                Err(Error::BadConfig(format!("unknown method {other:?}")))
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                }
                "dp_m" => config.dp.m = parse_f64(value, "dp_m")?,
                "dp_n" => config.dp.n = parse_f64(value, "dp_n")?,
                "normal_m" => config.normal.m = parse_f64(value, "normal_m")?,
                "attacks" => config.attacks = parse_attack_list(value)?,
                "seed" => {
                    config.seed = value.parse().map_err(|_| {
                        Error::BadConfig(format!("seed must be an integer, got {value:?}"))
                    })?;
                }
                "out_csv" => config.out_csv = Some(PathBuf::from(value)),
                "out_md" => config.out_md = Some(PathBuf::from(value)),
                "out_curve" => config.out_curve = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::BadConfig(format!("unknown key {other:?}")));
                }
            }
        }
        if !saw_images || !saw_logo {
            return Err(Error::BadConfig(
                "config must set both `images` and `logo`".into(),
            ));
        }
        Ok(config)
    }
}

/// Splits an attack-grid value into specs. Specs are separated by
/// whitespace or by commas; a comma followed by a `key=value` fragment
/// without a `:` continues the previous spec (so `gauss:k=7,sigma=2.5`
/// stays one attack inside a comma-separated list).
fn parse_attack_list(value: &str) -> Result<Vec<AttackSpec>> {
    let mut specs = Vec::new();
    for word in value.split_whitespace() {
        let mut groups: Vec<String> = Vec::new();
        for token in word.split(',') {
            if token.is_empty() {
                continue;
            }
            if token.contains(':') || groups.is_empty() {
                groups.push(token.to_string());
            } else {
                let last = groups.last_mut().expect("nonempty by branch");
                last.push(',');
                last.push_str(token);
            }
        }
        for group in groups {
            specs.push(AttackSpec::parse(&group)?);
        }
    }
    Ok(specs)
}

/// One measurement row. `attack == "none"` rows carry the no-attack
/// extraction BER and the embedding PSNR.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub image: String,
    pub method: Method,
    pub attack: String,
    pub params: String,
    pub ber_percent: f64,
    pub psnr_embed: Psnr,
    /// PSNR of the attacked image against the watermarked one; the
    /// infinite sentinel for the no-attack row.
    pub psnr_attack: Psnr,
    /// Seed used by a stochastic attack, empty otherwise.
    pub seed: Option<u64>,
    /// Grid position used for stable ordering (none = 0, attacks 1..).
    attack_index: usize,
}

/// Outcome of a suite run: measurement rows plus per-file problems that
/// were skipped without aborting the suite.
#[derive(Debug)]
pub struct SuiteOutput {
    pub records: Vec<BenchRecord>,
    pub skipped: Vec<(PathBuf, String)>,
}

fn derived_seed(base: u64, image_index: usize, attack_index: usize) -> u64 {
    // splitmix-style mix keeps per-(image, attack) streams independent.
    let mut z = base
        .wrapping_add((image_index as u64 + 1).wrapping_mul(0x9E3779B97F4A7C15))
        .wrapping_add((attack_index as u64 + 1).wrapping_mul(0xBF58476D1CE4E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Lists `.pgm` files in the directory, sorted by filename.
fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .map(|e| e.eq_ignore_ascii_case("pgm"))
                .unwrap_or(false)
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Runs the whole grid: for each (image, method), embed once and record the
/// no-attack row, then attack/extract/measure per attack. Images are
/// processed in parallel; records are sorted (image, attack, method) before
/// return so emission order is stable.
pub fn run_suite(config: &BenchConfig) -> Result<SuiteOutput> {
    let logo_bytes = std::fs::read(&config.logo_path)?;
    let logo = binarize(&pgm::load_pgm(&logo_bytes)?, 128);
    let paths = list_images(&config.images_dir)?;
    if paths.is_empty() {
        return Err(Error::BadConfig(format!(
            "no .pgm images found in {}",
            config.images_dir.display()
        )));
    }

    let results: Vec<std::result::Result<Vec<BenchRecord>, (PathBuf, String)>> = paths
        .par_iter()
        .enumerate()
        .map(|(image_index, path)| {
            run_one_image(config, &logo, image_index, path)
                .map_err(|e| (path.clone(), e.to_string()))
        })
        .collect();

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for result in results {
        match result {
            Ok(rows) => records.extend(rows),
            Err(problem) => skipped.push(problem),
        }
    }
    records.sort_by(|a, b| {
        a.image
            .cmp(&b.image)
            .then(a.attack_index.cmp(&b.attack_index))
            .then(a.method.to_string().cmp(&b.method.to_string()))
    });
    Ok(SuiteOutput { records, skipped })
}

fn run_one_image(
    config: &BenchConfig,
    logo: &BitPlane,
    image_index: usize,
    path: &Path,
) -> Result<Vec<BenchRecord>> {
    let cover = pgm::load_pgm(&std::fs::read(path)?)?;
    let image_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let mut rows = Vec::new();
    for &method in &config.methods {
        let (marked, report) = match method {
            Method::Dp => embed_dp(&cover, logo, &config.dp)?,
            Method::Normal => embed_normal(&cover, logo, &config.normal)?,
        };
        let extract = |img: &GrayImage| -> Result<f64> {
            let extracted = match method {
                Method::Dp => extract_dp(img, &config.dp)?,
                Method::Normal => extract_normal(img, &config.normal)?,
            };
            ber(logo, &extracted)
        };
        rows.push(BenchRecord {
            image: image_name.clone(),
            method,
            attack: "none".into(),
            params: String::new(),
            ber_percent: extract(&marked)?,
            psnr_embed: report.psnr,
            psnr_attack: Psnr::Infinite,
            seed: None,
            attack_index: 0,
        });
        for (attack_index, spec) in config.attacks.iter().enumerate() {
            let seed = if spec.is_stochastic() {
                Some(
                    spec.seed
                        .unwrap_or_else(|| derived_seed(config.seed, image_index, attack_index)),
                )
            } else {
                None
            };
            let attacked = spec.apply(&marked, seed)?;
            rows.push(BenchRecord {
                image: image_name.clone(),
                method,
                attack: spec.kind_name().into(),
                params: spec.param_string(),
                ber_percent: extract(&attacked)?,
                psnr_embed: report.psnr,
                psnr_attack: psnr(&marked, &attacked)?,
                seed,
                attack_index: attack_index + 1,
            });
        }
    }
    Ok(rows)
}

/// CSV with the fixed column set; floats carry two decimals and infinite
/// PSNR prints as `inf`.
pub fn emit_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from("image,method,attack,params,ber_percent,psnr_embed_db,psnr_attack_db,seed\n");
    for r in records {
        let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{:.2},{},{},{}\n",
            r.image, r.method, r.attack, r.params, r.ber_percent, r.psnr_embed, r.psnr_attack,
            seed
        ));
    }
    out
}

/// Mean BER per (attack, params, method) in first-seen grid order.
pub fn aggregate_mean_ber(records: &[BenchRecord]) -> Vec<(String, String, Method, f64)> {
    let mut order: Vec<(String, String, Method)> = Vec::new();
    let mut sums: BTreeMap<(String, String, String), (f64, usize)> = BTreeMap::new();
    for r in records {
        let key = (r.attack.clone(), r.params.clone(), r.method.to_string());
        if !sums.contains_key(&key) {
            order.push((r.attack.clone(), r.params.clone(), r.method));
        }
        let entry = sums.entry(key).or_insert((0.0, 0));
        entry.0 += r.ber_percent;
        entry.1 += 1;
    }
    order
        .into_iter()
        .map(|(attack, params, method)| {
            let (sum, count) = sums[&(attack.clone(), params.clone(), method.to_string())];
            (attack, params, method, sum / count as f64)
        })
        .collect()
}

/// Mean-BER curve for one attack kind as CSV rows `param,method,mean_ber`,
/// ready for external plotting.
pub fn emit_curve_csv(records: &[BenchRecord], kind: &str) -> String {
    let mut out = String::from("param,method,mean_ber\n");
    for (attack, params, method, mean) in aggregate_mean_ber(records) {
        if attack == kind {
            out.push_str(&format!("{params},{method},{mean:.2}\n"));
        }
    }
    out
}

/// Markdown report: one mean-BER table per attack kind with methods as
/// columns, plus an embedding-PSNR summary.
pub fn emit_markdown(records: &[BenchRecord]) -> String {
    let mut out = String::from("# Benchmark report\n");
    out.push_str(
        "\nGaussian-noise `var` is variance on a [0,1] intensity scale \
         (noise sigma in pixel units is 255*sqrt(var)).\n",
    );

    // Embedding PSNR summary over the no-attack rows.
    let mut psnr_sums: BTreeMap<String, (f64, usize, bool)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.attack == "none") {
        let entry = psnr_sums.entry(r.method.to_string()).or_insert((0.0, 0, false));
        match r.psnr_embed {
            Psnr::Db(v) => {
                entry.0 += v;
                entry.1 += 1;
            }
            Psnr::Infinite => entry.2 = true,
        }
    }
    if !psnr_sums.is_empty() {
        out.push_str("\n## Embedding quality\n\n| method | mean PSNR (dB) |\n|---|---|\n");
        for (method, (sum, count, saw_inf)) in &psnr_sums {
            let text = if *count == 0 && *saw_inf {
                "inf".to_string()
            } else {
                format!("{:.2}", sum / *count as f64)
            };
            out.push_str(&format!("| {method} | {text} |\n"));
        }
    }

    let aggregated = aggregate_mean_ber(records);
    let mut methods: Vec<String> = Vec::new();
    for (_, _, method, _) in &aggregated {
        let name = method.to_string();
        if !methods.contains(&name) {
            methods.push(name);
        }
    }
    // Group rows per attack kind, preserving grid order.
    let mut kinds: Vec<String> = Vec::new();
    for (attack, _, _, _) in &aggregated {
        if !kinds.contains(attack) {
            kinds.push(attack.clone());
        }
    }
    for kind in kinds {
        out.push_str(&format!("\n## {kind}\n\n| params |"));
        for m in &methods {
            out.push_str(&format!(" {m} |"));
        }
        out.push_str("\n|---|");
        for _ in &methods {
            out.push_str("---|");
        }
        out.push('\n');
        let mut params_order: Vec<String> = Vec::new();
        for (attack, params, _, _) in &aggregated {
            if *attack == kind && !params_order.contains(params) {
                params_order.push(params.clone());
            }
        }
        for params in params_order {
            let label = if params.is_empty() { "-" } else { &params };
            out.push_str(&format!("| {label} |"));
            for m in &methods {
                let cell = aggregated
                    .iter()
                    .find(|(a, p, method, _)| {
                        *a == kind && *p == params && method.to_string() == *m
                    })
                    .map(|(_, _, _, mean)| format!("{mean:.2}"))
                    .unwrap_or_else(|| "-".into());
                out.push_str(&format!(" {cell} |"));
            }
            out.push('\n');
        }
    }
    out
}
