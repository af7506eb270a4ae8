//! Writes the canonical desk set (ten deterministic 512x512 textured
//! covers, seeds 2000-2009) and the demo logo as PGM files, so the bench
//! subcommand can run without external images.
//!
//! Usage: cargo run --release --example make_desk_set -- <output-dir>

use dpmark::{pgm, synth};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "desk".to_string());
    let dir = std::path::Path::new(&dir);
    let covers = dir.join("covers");
    std::fs::create_dir_all(&covers).expect("create output directory");
    for seed in 2000u64..2010 {
        let img = synth::textured_image(512, 512, seed);
        let path = covers.join(format!("cover_{seed}.pgm"));
        std::fs::write(&path, pgm::save_pgm(&img)).expect("write cover");
        println!("wrote {}", path.display());
    }
    let logo = synth::demo_logo();
    let logo_path = dir.join("logo.pgm");
    std::fs::write(&logo_path, pgm::save_pgm(&logo.to_gray())).expect("write logo");
    println!("wrote {}", logo_path.display());
}
