//! Deterministic synthetic test images.
//!
//! Standard test images are not redistributable, so sweeps and tests run on
//! a generated corpus: a smooth gradient, a soft-edged checkerboard,
//! band-limited noise, a textured elliptical phantom and a power-law
//! "terrain" with a natural-image-like spectrum. All generators keep pixel
//! values away from the 0/255 rails.
//!
//! [`SyntheticKind::Texture`] is deliberately rough (strong detail at the
//! embedding scale) and is left out of [`corpus`]. Host interference on such
//! content causes occasional clean-image bit errors at low strengths.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::dct::{dct2_2d, dct3_2d};
use crate::error::{Error, Result};
use crate::image_io::{quantize, Image, RealField};
use crate::keystream::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SyntheticKind {
    Gradient,
    Checkerboard,
    BandLimitedNoise,
    Phantom,
    Terrain,
    Texture,
}

impl SyntheticKind {
    pub const ALL: [SyntheticKind; 6] = [
        SyntheticKind::Gradient,
        SyntheticKind::Checkerboard,
        SyntheticKind::BandLimitedNoise,
        SyntheticKind::Phantom,
        SyntheticKind::Terrain,
        SyntheticKind::Texture,
    ];

    /// Members of the standard corpus.
    pub const CORPUS: [SyntheticKind; 5] = [
        SyntheticKind::Gradient,
        SyntheticKind::Checkerboard,
        SyntheticKind::BandLimitedNoise,
        SyntheticKind::Phantom,
        SyntheticKind::Terrain,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SyntheticKind::Gradient => "gradient",
            SyntheticKind::Checkerboard => "checkerboard",
            SyntheticKind::BandLimitedNoise => "bandnoise",
            SyntheticKind::Phantom => "phantom",
            SyntheticKind::Terrain => "terrain",
            SyntheticKind::Texture => "texture",
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SyntheticKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown synthetic image kind {s:?}")))
    }
}

/// Renders one synthetic image of side `side`.
pub fn generate(kind: SyntheticKind, side: usize, seed: u64) -> Result<Image> {
    let field = match kind {
        SyntheticKind::Gradient => gradient(side),
        SyntheticKind::Checkerboard => checkerboard(side),
        SyntheticKind::BandLimitedNoise => {
            spectral_noise(side, seed, |f| (-(f / 0.03).powi(2)).exp(), 32.0)
        }
        SyntheticKind::Phantom => phantom(side, seed),
        SyntheticKind::Terrain => spectral_noise(
            side,
            seed,
            |f| (f + 0.004).powf(-1.4) * (-(f / 0.035).powi(2)).exp(),
            36.0,
        ),
        SyntheticKind::Texture => spectral_noise(
            side,
            seed,
            |f| (f + 0.004).powf(-1.0) * (-(f / 0.12).powi(2)).exp(),
            36.0,
        ),
    };
    quantize(&RealField::new(side, side, field)?)
}

/// The standard five-image corpus, `(name, image)` in fixed order.
pub fn corpus(side: usize, seed: u64) -> Result<Vec<(String, Image)>> {
    SyntheticKind::CORPUS
        .into_iter()
        .enumerate()
        .map(|(i, kind)| {
            let img = generate(kind, side, seed.wrapping_add(i as u64))?;
            Ok((format!("synth-{}", kind.name()), img))
        })
        .collect()
}

fn unit(i: usize, side: usize) -> f64 {
    (i as f64 + 0.5) / side as f64
}

fn gradient(side: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(side * side);
    for r in 0..side {
        for c in 0..side {
            let (y, x) = (unit(r, side), unit(c, side));
            v.push(40.0 + 120.0 * x + 50.0 * y * y + 10.0 * (PI * x * y).sin());
        }
    }
    v
}

fn checkerboard(side: usize) -> Vec<f64> {
    // eight squares per side, edges rounded by a tanh profile
    let mut v = Vec::with_capacity(side * side);
    for r in 0..side {
        for c in 0..side {
            let (y, x) = (unit(r, side), unit(c, side));
            let s = (8.0 * PI * x).sin() * (8.0 * PI * y).sin();
            v.push(128.0 + 60.0 * (1.5 * s).tanh());
        }
    }
    v
}

/// White noise shaped in the cosine domain by `gain(radial frequency in
/// cycles/pixel)`, rescaled to the given standard deviation around 128.
fn spectral_noise(side: usize, seed: u64, gain: impl Fn(f64) -> f64, std: f64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    let mut v: Vec<f64> = (0..side * side).map(|_| rng.next_unit() - 0.5).collect();
    dct2_2d(&mut v, side);
    for k1 in 0..side {
        for k2 in 0..side {
            let f = ((k1 * k1 + k2 * k2) as f64).sqrt() / (2 * side) as f64;
            v[k1 * side + k2] *= if k1 == 0 && k2 == 0 { 0.0 } else { gain(f) };
        }
    }
    dct3_2d(&mut v, side);
    let rms = (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
    let scale = if rms > 0.0 { std / rms } else { 0.0 };
    v.iter().map(|x| (128.0 + x * scale).clamp(8.0, 247.0)).collect()
}

fn phantom(side: usize, seed: u64) -> Vec<f64> {
    // (center x, center y, semi-axis a, semi-axis b, rotation, intensity)
    const ELLIPSES: [(f64, f64, f64, f64, f64, f64); 6] = [
        (0.0, 0.0, 0.69, 0.92, 0.0, 70.0),
        (0.0, -0.0184, 0.6624, 0.874, 0.0, 40.0),
        (0.22, 0.0, 0.11, 0.31, -0.314, -25.0),
        (-0.22, 0.0, 0.16, 0.41, 0.314, -25.0),
        (0.0, 0.35, 0.21, 0.25, 0.0, 20.0),
        (0.0, -0.605, 0.046, 0.023, 0.0, 25.0),
    ];
    let mut rng = SplitMix64::new(seed);
    let phase = 2.0 * PI * rng.next_unit();
    let edge = 12.0 / side as f64;
    let mut v = Vec::with_capacity(side * side);
    for r in 0..side {
        for c in 0..side {
            let y = 2.0 * unit(r, side) - 1.0;
            let x = 2.0 * unit(c, side) - 1.0;
            let mut value = 40.0;
            for &(cx, cy, a, b, rot, amp) in &ELLIPSES {
                let (s, co) = rot.sin_cos();
                let dx = x - cx;
                let dy = y - cy;
                let u = (dx * co + dy * s) / a;
                let w = (-dx * s + dy * co) / b;
                let d = (u * u + w * w).sqrt() - 1.0;
                // smooth step across the boundary
                value += amp * 0.5 * (1.0 - (d * a.min(b) / edge).tanh());
            }
            value += 4.0 * (2.0 * PI * (x * 11.0 + y * 7.0) + phase).sin();
            v.push(value);
        }
    }
    v
}
