//! Dumps the benchmark statistics the acceptance suite relies on.

use dpmark::attack::AttackSpec;
use dpmark::metrics::ber;
use dpmark::synth;
use dpmark::watermark::{embed_dp, embed_normal, extract_dp, extract_normal, DpParams, NormalParams};

fn main() {
    let n_images: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10);
    let base_seed: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2000);
    let logo = synth::demo_logo();
    let dp = DpParams::DEFAULT;
    let normal = NormalParams::DEFAULT;
    let specs: Vec<(&str, AttackSpec)> = vec![
        ("jpeg60", AttackSpec::parse("jpeg:qf=60").unwrap()),
        ("jpeg50", AttackSpec::parse("jpeg:qf=50").unwrap()),
        ("jpeg40", AttackSpec::parse("jpeg:qf=40").unwrap()),
        ("jpeg30", AttackSpec::parse("jpeg:qf=30").unwrap()),
        ("jpeg20", AttackSpec::parse("jpeg:qf=20").unwrap()),
        ("avg9", AttackSpec::parse("avg:k=9").unwrap()),
        ("median9", AttackSpec::parse("median:k=9").unwrap()),
        ("sp1", AttackSpec::parse("spnoise:pct=1,seed=99").unwrap()),
        ("resize0.2", AttackSpec::parse("resize:f=0.2").unwrap()),
        ("resize0.8", AttackSpec::parse("resize:f=0.8").unwrap()),
    ];
    let mut psnr_dp = 0.0;
    let mut psnr_n = 0.0;
    let mut none_dp = 0.0;
    let mut none_n = 0.0;
    let mut sums: Vec<(f64, f64)> = vec![(0.0, 0.0); specs.len()];
    for i in 0..n_images {
        let cover = synth::textured_image(512, 512, base_seed + i as u64);
        let (marked_dp, report_dp) = embed_dp(&cover, &logo, &dp).unwrap();
        let (marked_n, report_n) = embed_normal(&cover, &logo, &normal).unwrap();
        psnr_dp += report_dp.psnr.db().unwrap();
        psnr_n += report_n.psnr.db().unwrap();
        none_dp += ber(&logo, &extract_dp(&marked_dp, &dp).unwrap()).unwrap();
        none_n += ber(&logo, &extract_normal(&marked_n, &normal).unwrap()).unwrap();
        for (j, (_, spec)) in specs.iter().enumerate() {
            let a_dp = spec.apply(&marked_dp, Some(99)).unwrap();
            let a_n = spec.apply(&marked_n, Some(99)).unwrap();
            sums[j].0 += ber(&logo, &extract_dp(&a_dp, &dp).unwrap()).unwrap();
            sums[j].1 += ber(&logo, &extract_normal(&a_n, &normal).unwrap()).unwrap();
        }
    }
    let k = n_images as f64;
    println!("n={n_images} seed_base={base_seed}");
    println!("psnr dp {:.2}  normal {:.2}", psnr_dp / k, psnr_n / k);
    println!("none  dp {:.3}  normal {:.3}", none_dp / k, none_n / k);
    for (j, (name, _)) in specs.iter().enumerate() {
        println!(
            "{name:10} dp {:6.2}  normal {:6.2}",
            sums[j].0 / k,
            sums[j].1 / k
        );
    }
}
