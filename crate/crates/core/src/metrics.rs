//! Image quality and detection metrics.

use crate::error::{Error, Result};
use crate::image_io::Image;

fn same_size(a: &Image, b: &Image) -> Result<()> {
    if a.side() != b.side() {
        return Err(Error::DimensionMismatch(a.side(), b.side()));
    }
    Ok(())
}

pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    same_size(a, b)?;
    let sum: u64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = i64::from(x) - i64::from(y);
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / a.pixels().len() as f64)
}

/// PSNR in dB for 8-bit peak; `f64::INFINITY` when the images are equal.
pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0f64 * 255.0 / mse).log10()
    }
}

fn check_bits(sent: &[bool], received: &[bool]) -> Result<()> {
    if sent.len() != received.len() {
        return Err(Error::LengthMismatch {
            left: sent.len(),
            right: received.len(),
        });
    }
    if sent.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Bit error rate in percent.
pub fn ber(sent: &[bool], received: &[bool]) -> Result<f64> {
    check_bits(sent, received)?;
    let errors = sent.iter().zip(received).filter(|(a, b)| a != b).count();
    Ok(100.0 * errors as f64 / sent.len() as f64)
}

/// Normalized cross-correlation of the ±1-mapped bit sequences.
pub fn nc(sent: &[bool], received: &[bool]) -> Result<f64> {
    check_bits(sent, received)?;
    let symbol = |b: bool| if b { 1.0 } else { -1.0 };
    let (mut cross, mut es, mut er) = (0.0f64, 0.0f64, 0.0f64);
    for (&s, &r) in sent.iter().zip(received) {
        let (s, r) = (symbol(s), symbol(r));
        cross += s * r;
        es += s * s;
        er += r * r;
    }
    Ok(cross / (es * er).sqrt())
}

pub fn histogram(img: &Image) -> [u64; 256] {
    let mut bins = [0u64; 256];
    for &p in img.pixels() {
        bins[usize::from(p)] += 1;
    }
    bins
}

/// Sum of absolute bin differences.
pub fn histogram_distance(a: &[u64; 256], b: &[u64; 256]) -> u64 {
    a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).sum()
}

/// All metrics for one (image, alpha, attack) evaluation cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// Cover vs watermarked.
    pub mse: f64,
    pub psnr_db: f64,
    /// Sent vs extracted after the attack.
    pub ber_percent: f64,
    pub nc: f64,
    /// Histogram of the watermarked image.
    pub histogram: [u64; 256],
}

impl MetricsReport {
    pub fn compute(
        cover: &Image,
        watermarked: &Image,
        sent: &[bool],
        received: &[bool],
    ) -> Result<Self> {
        let mse = mse(cover, watermarked)?;
        Ok(Self {
            mse,
            psnr_db: psnr_from_mse(mse),
            ber_percent: ber(sent, received)?,
            nc: nc(sent, received)?,
            histogram: histogram(watermarked),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keystream::SplitMix64;

    #[test]
    fn mse_cases() {
        let a = Image::filled(512, 10).unwrap();
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        let mut px = vec![0u8; 512 * 512];
        let zero = Image::new(512, 512, px.clone()).unwrap();
        px[1000] = 255;
        let one = Image::new(512, 512, px).unwrap();
        let m = mse(&zero, &one).unwrap();
        assert!((m - 255.0 * 255.0 / 262144.0).abs() < 1e-15);
        assert!((m - 0.24805).abs() < 1e-5);
        let small = Image::filled(32, 0).unwrap();
        assert!(matches!(
            mse(&zero, &small),
            Err(Error::DimensionMismatch(512, 32))
        ));
    }

    #[test]
    fn psnr_cases() {
        let a = Image::filled(32, 10).unwrap();
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        assert!((psnr_from_mse(1.589) - 46.12).abs() < 0.01);
    }

    #[test]
    fn symmetry() {
        let mut rng = SplitMix64::new(1);
        let a = Image::from_fn(64, |_, _| rng.next_u64() as u8).unwrap();
        let b = Image::from_fn(64, |_, _| rng.next_u64() as u8).unwrap();
        assert_eq!(mse(&a, &b).unwrap(), mse(&b, &a).unwrap());
        assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
    }

    #[test]
    fn ber_cases() {
        let s = vec![true; 64];
        assert_eq!(ber(&s, &s).unwrap(), 0.0);
        let a = [true, false, true, true, false, false, true, false];
        let b = a.map(|x| !x);
        assert_eq!(ber(&a, &b).unwrap(), 100.0);
        let mut r = s.clone();
        r[10] = false;
        assert_eq!(ber(&s, &r).unwrap(), 1.5625);
        assert!(matches!(ber(&[], &[]), Err(Error::EmptyInput)));
        assert!(matches!(
            ber(&[true], &[true, false]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn nc_cases() {
        let a = [true, false, true, true, false, false, true, false];
        assert_eq!(nc(&a, &a).unwrap(), 1.0);
        assert_eq!(nc(&a, &a.map(|x| !x)).unwrap(), -1.0);
        let b = [true, true, true, true, false, false, true, false];
        // 2 of 8 wrong -> BER 25% -> NC 0.5
        let d = [false, false, true, true, false, false, true, false];
        assert_eq!(ber(&b, &d).unwrap(), 25.0);
        assert_eq!(nc(&b, &d).unwrap(), 0.5);
        assert!(matches!(
            nc(&[true], &[]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn histogram_conservation() {
        let h = histogram(&Image::filled(32, 0).unwrap());
        assert_eq!(h[0], 1024);
        assert!(h[1..].iter().all(|&c| c == 0));
        let mut rng = SplitMix64::new(3);
        let img = Image::from_fn(128, |_, _| rng.next_u64() as u8).unwrap();
        assert_eq!(histogram(&img).iter().sum::<u64>(), 128 * 128);
        assert_eq!(histogram_distance(&h, &h), 0);
    }

    #[test]
    fn report_sentinel() {
        let a = Image::filled(32, 10).unwrap();
        let r = MetricsReport::compute(&a, &a, &[true, false], &[true, false]).unwrap();
        assert_eq!(r.mse, 0.0);
        assert_eq!(r.psnr_db, f64::INFINITY);
        assert_eq!(r.ber_percent, 0.0);
        assert_eq!(r.nc, 1.0);
        assert_eq!(r.histogram[10], 1024);
    }
}
