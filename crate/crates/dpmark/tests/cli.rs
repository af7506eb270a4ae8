//! End-to-end checks of the command-line binary: embed, attack, extract,
//! partition-analyze and bench wired through real files, plus exit codes.

use dpmark::metrics::ber;
use dpmark::plane::binarize;
use dpmark::{pgm, synth};
use std::path::Path;
use std::process::{Command, Output};

fn dpmark_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dpmark"))
}

fn write_fixtures(dir: &Path) {
    let cover = synth::textured_image(512, 512, 8000);
    std::fs::write(dir.join("cover.pgm"), pgm::save_pgm(&cover)).unwrap();
    let logo = synth::demo_logo();
    std::fs::write(dir.join("logo.pgm"), pgm::save_pgm(&logo.to_gray())).unwrap();
}

fn run_ok(cmd: &mut Command) -> Output {
    let output = cmd.output().expect("spawn dpmark");
    assert!(
        output.status.success(),
        "command failed: {:?}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

#[test]
fn embed_attack_extract_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let cover = dir.path().join("cover.pgm");
    let logo = dir.path().join("logo.pgm");
    let marked = dir.path().join("marked.pgm");
    let attacked = dir.path().join("attacked.pgm");
    let extracted = dir.path().join("extracted.pgm");
    let report = dir.path().join("report.txt");

    let output = run_ok(dpmark_bin().args([
        "embed",
        "--cover",
        cover.to_str().unwrap(),
        "--logo",
        logo.to_str().unwrap(),
        "--method",
        "dp",
        "-M",
        "69.1",
        "-N",
        "12",
        "--out",
        marked.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("PSNR"), "embed should report PSNR: {stderr}");
    let report_text = std::fs::read_to_string(&report).unwrap();
    assert!(report_text.contains("capacity_bits = 5120"), "{report_text}");

    run_ok(dpmark_bin().args([
        "attack",
        "--image",
        marked.to_str().unwrap(),
        "--attack",
        "jpeg:qf=40",
        "--out",
        attacked.to_str().unwrap(),
    ]));

    let output = run_ok(dpmark_bin().args([
        "extract",
        "--image",
        attacked.to_str().unwrap(),
        "--method",
        "dp",
        "--out",
        extracted.to_str().unwrap(),
        "--truth",
        logo.to_str().unwrap(),
    ]));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("BER vs truth"), "{stderr}");

    // The written logo decodes exactly like a library extraction would.
    let truth = binarize(&pgm::load_pgm(&std::fs::read(&logo).unwrap()).unwrap(), 128);
    let decoded = binarize(
        &pgm::load_pgm(&std::fs::read(&extracted).unwrap()).unwrap(),
        128,
    );
    let err = ber(&truth, &decoded).unwrap();
    assert!(err < 30.0, "round trip through qf=40 gave {err}%");
}

#[test]
fn no_attack_extraction_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let marked = dir.path().join("marked.pgm");
    run_ok(dpmark_bin().args([
        "embed",
        "--cover",
        dir.path().join("cover.pgm").to_str().unwrap(),
        "--logo",
        dir.path().join("logo.pgm").to_str().unwrap(),
        "--method",
        "normal",
        "--out",
        marked.to_str().unwrap(),
    ]));
    let extracted = dir.path().join("extracted.pgm");
    run_ok(dpmark_bin().args([
        "extract",
        "--image",
        marked.to_str().unwrap(),
        "--method",
        "normal",
        "--out",
        extracted.to_str().unwrap(),
    ]));
    let truth = binarize(
        &pgm::load_pgm(&std::fs::read(dir.path().join("logo.pgm")).unwrap()).unwrap(),
        128,
    );
    let decoded = binarize(
        &pgm::load_pgm(&std::fs::read(&extracted).unwrap()).unwrap(),
        128,
    );
    assert!(ber(&truth, &decoded).unwrap() <= 0.5);
}

#[test]
fn partition_analyze_prints_all_methods() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let output = run_ok(dpmark_bin().args([
        "partition-analyze",
        "--logo",
        dir.path().join("logo.pgm").to_str().unwrap(),
    ]));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("truncated-svd"), "{stdout}");
    assert!(stdout.contains("binary-wavelet"), "{stdout}");
    assert!(stdout.contains("spatial-scalability: alphabet=(2,3) reversible=pass error_propagation=1.0000"));
}

#[test]
fn bench_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    // Small covers keep this test quick; the logo is 1/8 of the cover.
    for i in 0..2u64 {
        let img = synth::textured_image(128, 128, 8100 + i);
        std::fs::write(dir.path().join(format!("c{i}.pgm")), pgm::save_pgm(&img)).unwrap();
    }
    let logo = synth::textured_image(16, 16, 8200);
    std::fs::write(
        dir.path().join("logo.pgm"),
        pgm::save_pgm(&binarize(&logo, 128).to_gray()),
    )
    .unwrap();
    let config = dir.path().join("bench.conf");
    std::fs::write(
        &config,
        format!(
            "images = {}\nlogo = {}\nseed = 5\nattacks = jpeg:qf=50 median:k=3\n",
            dir.path().display(),
            dir.path().join("logo.pgm").display()
        ),
    )
    .unwrap();
    let csv_path = dir.path().join("out.csv");
    let md_path = dir.path().join("out.md");
    run_ok(dpmark_bin().args([
        "bench",
        "--config",
        config.to_str().unwrap(),
        "--out-csv",
        csv_path.to_str().unwrap(),
        "--out-md",
        md_path.to_str().unwrap(),
    ]));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("image,method,attack,params,ber_percent,psnr_embed_db,psnr_attack_db,seed"));
    assert!(csv.lines().count() > 1);
    let md = std::fs::read_to_string(&md_path).unwrap();
    assert!(md.contains("## jpeg"));

    // CLI results equal direct library calls on the same config.
    let config = dpmark::bench::BenchConfig::from_file(&config).unwrap();
    let direct = dpmark::bench::emit_csv(&dpmark::bench::run_suite(&config).unwrap().records);
    assert_eq!(csv, direct);
}

#[test]
fn exit_codes() {
    // Usage error: unknown flag.
    let output = dpmark_bin().args(["embed", "--bogus"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));

    // Data error: missing file.
    let output = dpmark_bin()
        .args([
            "extract",
            "--image",
            "/nonexistent/never.pgm",
            "--method",
            "dp",
            "--out",
            "/tmp/never-out.pgm",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!output.stderr.is_empty());

    // Bad attack spec is a data error, reported to stderr.
    let dir = tempfile::tempdir().unwrap();
    let img = synth::textured_image(64, 64, 1);
    let img_path = dir.path().join("img.pgm");
    std::fs::write(&img_path, pgm::save_pgm(&img)).unwrap();
    let output = dpmark_bin()
        .args([
            "attack",
            "--image",
            img_path.to_str().unwrap(),
            "--attack",
            "warp:x=1",
            "--out",
            dir.path().join("out.pgm").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}
