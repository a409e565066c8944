// Generates the synthetic test corpus and reports basic statistics and
// embedding capacity.
//
//     cargo run --example synthetic_corpus

use wavemark::metrics::histogram;
use wavemark::synth::{generate, SyntheticKind};
use wavemark::watermark::capacity;

fn run_example() -> wavemark::Result<()> {
    println!("capacity at scale 4: 128 -> {}, 256 -> {}, 512 -> {} bits",
        capacity(128, 4)?, capacity(256, 4)?, capacity(512, 4)?);
    for kind in SyntheticKind::ALL {
        let img = generate(kind, 256, 1)?;
        let px = img.pixels();
        let mean = px.iter().map(|&p| f64::from(p)).sum::<f64>() / px.len() as f64;
        let occupied = histogram(&img).iter().filter(|&&c| c > 0).count();
        let lo = px.iter().min().copied().unwrap_or(0);
        let hi = px.iter().max().copied().unwrap_or(0);
        println!("{kind:13} mean {mean:6.2} range {lo:3}..{hi:3} grey levels used {occupied}");
    }
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
