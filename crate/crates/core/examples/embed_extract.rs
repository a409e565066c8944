// Embed a text message, save the PGM, reload it and extract with the
// right and a wrong key.
//
//     cargo run --example embed_extract

use wavemark::image_io::{load_pgm, save_pgm};
use wavemark::metrics::{mse, psnr};
use wavemark::synth::{generate, SyntheticKind};
use wavemark::watermark::{decode_message, embed, encode_message, extract, EmbedParams};
use wavemark::WatermarkKey;

fn run_example() -> wavemark::Result<()> {
    let cover = generate(SyntheticKind::Terrain, 512, 7)?;
    let key = WatermarkKey(0xDEC0DE);
    let params = EmbedParams::with_alpha(2.0);
    let msg = encode_message("copyright 2026".as_bytes())?;

    let marked = embed(&cover, key, &params, &msg)?;
    let path = std::env::temp_dir().join(format!("wavemark-example-{}.pgm", std::process::id()));
    save_pgm(&marked, &path)?;
    let reloaded = load_pgm(&path)?;
    let _ = std::fs::remove_file(&path);
    println!("{} bits, MSE {:.3}, PSNR {:.2} dB", msg.len(), mse(&cover, &marked)?, psnr(&cover, &marked)?);

    let bits = extract(&reloaded, key, &params, msg.len())?;
    let text = decode_message(&bits)?;
    println!("right key: {:?}", String::from_utf8_lossy(&text));
    assert_eq!(text, b"copyright 2026");

    let garbage = extract(&reloaded, WatermarkKey(0xBAD), &params, msg.len())?;
    match decode_message(&garbage) {
        Ok(bytes) => println!("wrong key: {:?}", String::from_utf8_lossy(&bytes)),
        Err(e) => println!("wrong key: {e}"),
    }
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
