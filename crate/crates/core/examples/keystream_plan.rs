// How a key selects blocks and chips for each message bit.
//
//     cargo run --example keystream_plan

use wavemark::keystream::{derive_plan, SplitMix64};
use wavemark::wave_atom::band_roster;
use wavemark::WatermarkKey;

fn run_example() -> wavemark::Result<()> {
    let mut rng = SplitMix64::new(0);
    let first: Vec<String> = (0..3).map(|_| format!("{:#018x}", rng.next_u64())).collect();
    println!("SplitMix64(0): {}", first.join(" "));

    let blocks = band_roster(512, 4)?;
    let key: WatermarkKey = "0x5eed".parse()?;
    let plan = derive_plan(key, &blocks, 8, 256)?;
    for (i, a) in plan.assignments.iter().enumerate() {
        let chips: String = a.chips[..16].iter().map(|&c| if c > 0 { '+' } else { '-' }).collect();
        println!("bit {i}: band ({:2},{:2}) chips {chips}...", a.block.m1, a.block.m2);
    }
    let other = derive_plan(WatermarkKey(key.0 ^ 1), &blocks, 8, 256)?;
    let shared = plan
        .assignments
        .iter()
        .zip(&other.assignments)
        .filter(|(a, b)| a.block == b.block)
        .count();
    println!("flipping one key bit leaves {shared} of 8 positions on the same band");
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
