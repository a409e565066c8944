use std::fs;
use std::path::Path;

use wavemark::cli::{self, cmd_evaluate, SweepConfig, EXIT_DATA, EXIT_OK, EXIT_USAGE};
use wavemark::image_io::{load_pgm, save_pgm};
use wavemark::synth::{generate, SyntheticKind};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        std::iter::once("wavemark").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn cover(dir: &Path, side: usize) -> String {
    let path = dir.join("cover.pgm");
    save_pgm(&generate(SyntheticKind::Phantom, side, 1).unwrap(), &path).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn embed_then_extract_text() {
    let dir = tempfile::tempdir().unwrap();
    let input = cover(dir.path(), 512);
    let marked = dir.path().join("marked.pgm");
    let marked = marked.to_str().unwrap();
    let (code, out, err) = run(&[
        "embed", "--in", &input, "--out", marked, "--key", "0x1234", "--message", "hello",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("capacity_bits: 240"));
    assert!(out.contains("embedded_bits: 56"));
    let (code, out, _) = run(&["extract", "--in", marked, "--key", "0x1234"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("text: hello"), "{out}");
}

#[test]
fn over_capacity_message_fails() {
    let dir = tempfile::tempdir().unwrap();
    let input = cover(dir.path(), 128);
    let out_path = dir.path().join("m.pgm");
    let (code, _, err) = run(&[
        "embed",
        "--in",
        &input,
        "--out",
        out_path.to_str().unwrap(),
        "--key",
        "1",
        "--message",
        "this message is too long",
    ]);
    assert_ne!(code, EXIT_OK);
    assert!(err.contains("capacity exceeded"), "{err}");
    assert!(!out_path.exists());
}

#[test]
fn missing_input_is_a_data_error() {
    let (code, _, err) = run(&["extract", "--in", "/nonexistent/x.pgm", "--key", "1"]);
    assert_eq!(code, EXIT_DATA);
    assert!(err.contains("/nonexistent/x.pgm"));
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(run(&["embed"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, EXIT_OK);
    let dir = tempfile::tempdir().unwrap();
    let input = cover(dir.path(), 64);
    let o = dir.path().join("a.pgm");
    let o = o.to_str().unwrap();
    let (code, _, err) = run(&["attack", "--in", &input, "--out", o, "--attack", "jpeg", "--param", "0"]);
    assert_eq!(code, EXIT_USAGE, "{err}");
    let (code, _, _) = run(&["attack", "--in", &input, "--out", o, "--attack", "awgn", "--param", "-1"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = run(&["extract", "--in", &input, "--key", "zzz"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn zero_sigma_noise_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let input = cover(dir.path(), 64);
    let o = dir.path().join("a.pgm");
    let (code, out, _) = run(&[
        "attack", "--in", &input, "--out", o.to_str().unwrap(), "--attack", "awgn", "--param", "0",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("psnr_db: inf"));
    assert_eq!(fs::read(&input).unwrap(), fs::read(&o).unwrap());
}

#[test]
fn synth_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(&["synth", "--out", dir.path().to_str().unwrap(), "--size", "64"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 5);
    let img = dir.path().join("synth-gradient.pgm");
    assert_eq!(load_pgm(&img).unwrap().side(), 64);
    let (code, dump, _) = run(&["dump", "--in", img.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(dump.lines().next(), Some("scale,m1,m2,n1,n2,value"));
    assert_eq!(dump.lines().count(), 1 + 64 * 64);
}

#[test]
fn evaluate_full_grid_shape() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let (code, out, err) = run(&[
        "evaluate",
        "--synthetic",
        "--synthetic-size",
        "128",
        "--bits",
        "32",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("rows: 270"));
    assert!(out.contains("failed_cells: 0"));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 270 + 54);
    assert!(text.lines().filter(|l| l.starts_with("MEAN,")).count() == 54);
}

#[test]
fn evaluate_is_reproducible_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("sweep.toml");
    fs::write(
        &cfg_path,
        "synthetic = [\"gradient\", \"terrain\"]\nsynthetic_size = 128\nalphas = [2.0]\n\
         attacks = [\"awgn:5\", \"jpeg:80\"]\nmessage_bits = 24\nkey = \"0xabc\"\n",
    )
    .unwrap();
    let text = fs::read_to_string(&cfg_path).unwrap();
    let cfg = SweepConfig::from_toml(&text, dir.path()).unwrap();
    let mut a = Vec::new();
    let mut b = Vec::new();
    cmd_evaluate(&cfg, None, &mut a).unwrap();
    cmd_evaluate(&cfg, None, &mut b).unwrap();
    assert_eq!(a, b);

    let (code, out, _) = run(&["evaluate", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.as_bytes(), &a[..]);
}

#[test]
fn unreadable_corpus_member_becomes_an_error_row() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(&[
        "evaluate",
        "--in",
        "/nonexistent/gone.pgm",
        "--bits",
        "8",
    ]);
    assert_eq!(code, EXIT_OK);
    let data: Vec<&str> = out.lines().skip(1).filter(|l| !l.starts_with("MEAN")).collect();
    assert_eq!(data.len(), 6 * 9);
    assert!(data.iter().all(|l| l.contains("gone.pgm")));
    drop(dir);
}
