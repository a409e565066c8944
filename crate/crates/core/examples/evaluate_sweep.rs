// A small evaluation sweep from a TOML description, printed as CSV plus a
// per-attack summary.
//
//     cargo run --example evaluate_sweep

use std::path::Path;

use wavemark::cli::{run_sweep, write_csv, SweepConfig};

const CONFIG: &str = r#"
synthetic = ["corpus"]
synthetic_size = 256
alphas = [1.5, 3.0]
attacks = ["none", "jpeg:80", "awgn:10"]
message_bits = 48
key = "0x5eed"
"#;

fn run_example() -> wavemark::Result<()> {
    let cfg = SweepConfig::from_toml(CONFIG, Path::new("."))?;
    let result = run_sweep(&cfg)?;
    let mut csv = Vec::new();
    write_csv(&result, &mut csv)?;
    for line in String::from_utf8_lossy(&csv).lines().take(4) {
        println!("{line}");
    }
    println!("... {} rows", result.rows.len());
    for agg in &result.aggregates {
        println!(
            "alpha {:3} {:>8}: BER {:5.2}%  PSNR {:5.2} dB  NC {:.3}",
            agg.alpha,
            agg.attack.to_string(),
            agg.ber_percent,
            agg.psnr_db,
            agg.nc
        );
    }
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
