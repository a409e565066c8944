// Forward and inverse wave atom transform of a synthetic image, with the
// per-scale layout and energy split.
//
//     cargo run --example transform_roundtrip

use wavemark::synth::{generate, SyntheticKind};
use wavemark::wave_atom;

fn run_example() -> wavemark::Result<()> {
    let img = generate(SyntheticKind::Phantom, 256, 0)?;
    let coeffs = wave_atom::forward(&img)?;
    println!("side {} -> {} coefficients in {} scales", img.side(), coeffs.coefficient_count(), coeffs.scales());
    for j in 1..=coeffs.scales() {
        let blocks = coeffs.list_blocks(j)?;
        let e: f64 = blocks
            .iter()
            .map(|&b| coeffs.get_block(b).map(|g| g.iter().map(|v| v * v).sum::<f64>()))
            .sum::<wavemark::Result<f64>>()?;
        println!(
            "scale {j}: {:4} bands of {:2}x{:<2} energy share {:.6}",
            blocks.len(),
            1 << j,
            1 << j,
            e / coeffs.energy()
        );
    }
    let back = wave_atom::inverse(&coeffs)?;
    let field = img.to_field();
    let err = back
        .values()
        .iter()
        .zip(field.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!("max reconstruction error {err:.3e}");
    assert!(err < 1e-9 * field.max_abs());
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
