// Bit error rate of a 64-bit watermark after JPEG-style compression and
// additive Gaussian noise.
//
//     cargo run --example attack_robustness

use wavemark::attacks::AttackSpec;
use wavemark::keystream::payload_bits;
use wavemark::metrics::{ber, psnr};
use wavemark::synth::{generate, SyntheticKind};
use wavemark::watermark::{embed, extract, EmbedParams, Message};
use wavemark::WatermarkKey;

fn run_example() -> wavemark::Result<()> {
    let cover = generate(SyntheticKind::Phantom, 512, 3)?;
    let key = WatermarkKey(99);
    let bits = payload_bits(key, 64);
    for alpha in [1.5, 3.0] {
        let params = EmbedParams::with_alpha(alpha);
        let marked = embed(&cover, key, &params, &Message::from_bits(bits.clone()))?;
        println!("alpha {alpha}");
        for spec in ["none", "jpeg:100", "jpeg:70", "jpeg:40", "awgn:5", "awgn:10", "awgn:20"] {
            let attack: AttackSpec = spec.parse()?;
            let attacked = attack.apply(&marked)?;
            let got = extract(&attacked, key, &params, bits.len())?;
            println!(
                "  {spec:9} PSNR {:6.2} dB  BER {:5.2}%",
                psnr(&marked, &attacked)?,
                ber(&bits, &got)?
            );
        }
    }
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
