//! Command-line front door: embed, extract, attack, calibrate,
//! partition-analyze, and bench.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Messages go to
//! stderr; data goes to files or stdout.

use clap::{Args, Parser, Subcommand};
use dpmark::attack::AttackSpec;
use dpmark::bench::{emit_csv, emit_markdown, run_suite, BenchConfig};
use dpmark::partition::{
    error_propagation, reconstruct, split_bwd, split_spatial, split_svd, PartitionMethod,
    WaveletKernel,
};
use dpmark::watermark::{
    calibrate, embed_dp, embed_normal, extract_dp, extract_normal, DpParams, Method,
    NormalParams, DEFAULT_DP_RATIO,
};
use dpmark::{ber, binarize, pgm, BitPlane, GrayImage};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "dpmark",
    about = "Blind image-in-image watermarking with two-layer DCT QIM and data partitioning",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MethodArg {
    Dp,
    Normal,
}

impl From<MethodArg> for Method {
    fn from(value: MethodArg) -> Method {
        match value {
            MethodArg::Dp => Method::Dp,
            MethodArg::Normal => Method::Normal,
        }
    }
}

#[derive(Args)]
struct StrengthArgs {
    /// Base/primary strength (defaults: 69.1 for dp, 62.2 for normal).
    #[arg(short = 'M', long = "M")]
    m: Option<f64>,
    /// Enhancement strength for the dp method (default 12).
    #[arg(short = 'N', long = "N")]
    n: Option<f64>,
}

impl StrengthArgs {
    fn dp(&self) -> DpParams {
        DpParams {
            m: self.m.unwrap_or(DpParams::DEFAULT.m),
            n: self.n.unwrap_or(DpParams::DEFAULT.n),
        }
    }

    fn normal(&self) -> NormalParams {
        NormalParams {
            m: self.m.unwrap_or(NormalParams::DEFAULT.m),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Embed a binary logo into a grayscale cover image.
    Embed {
        #[arg(long)]
        cover: PathBuf,
        /// Logo PGM; binarized at threshold 128.
        #[arg(long)]
        logo: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[command(flatten)]
        strengths: StrengthArgs,
        #[arg(long)]
        out: PathBuf,
        /// Optional report file (key = value lines).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Blindly extract the logo from a watermarked image.
    Extract {
        #[arg(long)]
        image: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[command(flatten)]
        strengths: StrengthArgs,
        /// Output PGM for the extracted logo (written as 0/255).
        #[arg(long)]
        out: PathBuf,
        /// Original logo; when given, the BER against it is reported.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Apply a signal-processing attack to an image.
    Attack {
        #[arg(long)]
        image: PathBuf,
        /// Attack spec, e.g. jpeg:qf=30, avg:k=9, gauss:k=7,sigma=2.5,
        /// gnoise:var=1e-3,seed=7, spnoise:pct=1, resize:f=0.4.
        #[arg(long)]
        attack: String,
        #[arg(long)]
        out: PathBuf,
        /// Seed for stochastic attacks when the spec carries none.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Search the strength that hits a target mean embedding PSNR.
    Calibrate {
        /// Directory of cover PGMs.
        #[arg(long)]
        covers: PathBuf,
        #[arg(long)]
        logo: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long = "target-psnr")]
        target_psnr: f64,
        /// N/M ratio used for the dp method (default 12/69.1).
        #[arg(long)]
        ratio: Option<f64>,
    },
    /// Analyze the three partitioning methods on a logo.
    PartitionAnalyze {
        #[arg(long)]
        logo: PathBuf,
        /// Truncation rank for the SVD method.
        #[arg(long = "svd-rank", default_value_t = 5)]
        svd_rank: usize,
    },
    /// Run the benchmark grid from a config file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "out-csv")]
        out_csv: Option<PathBuf>,
        #[arg(long = "out-md")]
        out_md: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{err}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn load_image(path: &Path) -> dpmark::Result<GrayImage> {
    pgm::load_pgm(&std::fs::read(path)?)
}

fn load_logo(path: &Path) -> dpmark::Result<BitPlane> {
    Ok(binarize(&load_image(path)?, 128))
}

fn load_covers(dir: &Path) -> dpmark::Result<Vec<GrayImage>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .map(|e| e.eq_ignore_ascii_case("pgm"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    paths.iter().map(|p| load_image(p)).collect()
}

fn run(command: Command) -> dpmark::Result<()> {
    match command {
        Command::Embed {
            cover,
            logo,
            method,
            strengths,
            out,
            report,
        } => {
            let cover_img = load_image(&cover)?;
            let logo_bits = load_logo(&logo)?;
            let (marked, embed_report) = match method.into() {
                Method::Dp => embed_dp(&cover_img, &logo_bits, &strengths.dp())?,
                Method::Normal => embed_normal(&cover_img, &logo_bits, &strengths.normal())?,
            };
            std::fs::write(&out, pgm::save_pgm(&marked))?;
            eprintln!(
                "embedded {} symbols in {} blocks, PSNR {} dB",
                embed_report.capacity_bits, embed_report.blocks_used, embed_report.psnr
            );
            if let Some(report_path) = report {
                std::fs::write(
                    report_path,
                    format!(
                        "psnr_db = {}\nblocks_used = {}\ncapacity_bits = {}\n",
                        embed_report.psnr, embed_report.blocks_used, embed_report.capacity_bits
                    ),
                )?;
            }
            Ok(())
        }
        Command::Extract {
            image,
            method,
            strengths,
            out,
            truth,
        } => {
            let img = load_image(&image)?;
            let extracted = match method.into() {
                Method::Dp => extract_dp(&img, &strengths.dp())?,
                Method::Normal => extract_normal(&img, &strengths.normal())?,
            };
            std::fs::write(&out, pgm::save_pgm(&extracted.to_gray()))?;
            if let Some(truth_path) = truth {
                let truth_bits = load_logo(&truth_path)?;
                eprintln!("BER vs truth: {:.2}%", ber(&truth_bits, &extracted)?);
            }
            Ok(())
        }
        Command::Attack {
            image,
            attack,
            out,
            seed,
        } => {
            let img = load_image(&image)?;
            let spec = AttackSpec::parse(&attack)?;
            let attacked = spec.apply(&img, seed)?;
            std::fs::write(&out, pgm::save_pgm(&attacked))?;
            Ok(())
        }
        Command::Calibrate {
            covers,
            logo,
            method,
            target_psnr,
            ratio,
        } => {
            let cover_imgs = load_covers(&covers)?;
            let logo_bits = load_logo(&logo)?;
            let method: Method = method.into();
            let ratio = ratio.unwrap_or(DEFAULT_DP_RATIO);
            let result = calibrate(&cover_imgs, &logo_bits, target_psnr, method, ratio)?;
            match result.n {
                Some(n) => println!(
                    "method=dp M={:.4} N={:.4} psnr={:.3}",
                    result.m, n, result.achieved_psnr_db
                ),
                None => println!(
                    "method=normal M={:.4} psnr={:.3}",
                    result.m, result.achieved_psnr_db
                ),
            }
            Ok(())
        }
        Command::PartitionAnalyze { logo, svd_rank } => {
            let logo_bits = load_logo(&logo)?;
            let methods = [
                (
                    "truncated-svd",
                    PartitionMethod::TruncatedSvd { rank: svd_rank },
                ),
                (
                    "binary-wavelet",
                    PartitionMethod::BinaryWavelet {
                        kernel: WaveletKernel::default(),
                    },
                ),
                ("spatial-scalability", PartitionMethod::SpatialScalability),
            ];
            for (name, method) in &methods {
                let parts = match method {
                    PartitionMethod::TruncatedSvd { rank } => split_svd(&logo_bits, *rank)?,
                    PartitionMethod::BinaryWavelet { kernel } => split_bwd(&logo_bits, kernel)?,
                    PartitionMethod::SpatialScalability => split_spatial(&logo_bits)?,
                };
                let (k_base, k_enh) = parts.alphabet_sizes();
                let reversible = reconstruct(&parts)? == logo_bits;
                let report = error_propagation(method, &logo_bits)?;
                print!(
                    "{name}: alphabet=({k_base},{k_enh}) reversible={} error_propagation={:.4}",
                    if reversible { "pass" } else { "FAIL" },
                    report.mean_bits_per_error
                );
                match report.base_mean {
                    Some(base_mean) => println!(" base_propagation={base_mean:.4}"),
                    None => println!(),
                }
            }
            Ok(())
        }
        Command::Bench {
            config,
            out_csv,
            out_md,
        } => {
            let mut bench_config = BenchConfig::from_file(&config)?;
            if out_csv.is_some() {
                bench_config.out_csv = out_csv;
            }
            if out_md.is_some() {
                bench_config.out_md = out_md;
            }
            let output = run_suite(&bench_config)?;
            for (path, reason) in &output.skipped {
                eprintln!("skipped {}: {}", path.display(), reason);
            }
            let csv = emit_csv(&output.records);
            match &bench_config.out_csv {
                Some(path) => std::fs::write(path, &csv)?,
                None => print!("{csv}"),
            }
            if let Some(path) = &bench_config.out_md {
                std::fs::write(path, emit_markdown(&output.records))?;
            }
            if let Some(path) = &bench_config.out_curve {
                std::fs::write(path, dpmark::bench::emit_curve_csv(&output.records, "jpeg"))?;
            }
            eprintln!(
                "bench complete: {} records, {} skipped files",
                output.records.len(),
                output.skipped.len()
            );
            Ok(())
        }
    }
}
