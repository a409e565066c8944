//! Deterministic robustness attacks: additive white Gaussian noise and the
//! lossy core of baseline JPEG (8×8 DCT quantization, no entropy coding).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::dct::{dct2_2d, dct3_2d};
use crate::error::{Error, Result};
use crate::image_io::{quantize, quantize_sample, Image, RealField};
use crate::keystream::SplitMix64;

/// Annex K luminance quantization table, row-major.
pub const LUMINANCE_BASE_TABLE: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

const BLOCK: usize = 8;

/// Which degradation to apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttackSpec {
    None,
    Awgn { sigma: f64, noise_seed: u64 },
    Jpeg { quality: u8 },
}

impl AttackSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            AttackSpec::None => "none",
            AttackSpec::Awgn { .. } => "awgn",
            AttackSpec::Jpeg { .. } => "jpeg",
        }
    }

    /// Parameter column: sigma for awgn, quality for jpeg, empty otherwise.
    pub fn parameter(&self) -> String {
        match self {
            AttackSpec::None => String::new(),
            AttackSpec::Awgn { sigma, .. } => sigma.to_string(),
            AttackSpec::Jpeg { quality } => quality.to_string(),
        }
    }

    pub fn noise_seed(&self) -> Option<u64> {
        match self {
            AttackSpec::Awgn { noise_seed, .. } => Some(*noise_seed),
            _ => None,
        }
    }

    /// Builds a spec from its kind name and numeric parameter.
    pub fn from_parts(kind: &str, param: Option<f64>, noise_seed: u64) -> Result<Self> {
        match kind {
            "none" => Ok(AttackSpec::None),
            "awgn" => {
                let sigma = param.ok_or_else(|| Error::InvalidAttack("awgn needs sigma".into()))?;
                if !(sigma.is_finite() && sigma >= 0.0) {
                    return Err(Error::NegativeSigma(sigma));
                }
                Ok(AttackSpec::Awgn { sigma, noise_seed })
            }
            "jpeg" => {
                let q = param.ok_or_else(|| Error::InvalidAttack("jpeg needs quality".into()))?;
                if q.fract() != 0.0 || !(1.0..=100.0).contains(&q) {
                    return Err(Error::QualityOutOfRange(q as i64));
                }
                Ok(AttackSpec::Jpeg { quality: q as u8 })
            }
            other => Err(Error::InvalidAttack(format!("unknown attack kind {other:?}"))),
        }
    }

    /// Same attack with a different noise seed (no-op for non-noise kinds).
    pub fn with_noise_seed(self, seed: u64) -> Self {
        match self {
            AttackSpec::Awgn { sigma, .. } => AttackSpec::Awgn {
                sigma,
                noise_seed: seed,
            },
            other => other,
        }
    }

    pub fn apply(&self, img: &Image) -> Result<Image> {
        match *self {
            AttackSpec::None => Ok(img.clone()),
            AttackSpec::Awgn { sigma, noise_seed } => awgn(img, sigma, noise_seed),
            AttackSpec::Jpeg { quality } => jpeg_attack(img, i64::from(quality)),
        }
    }
}

/// `none`, `jpeg:<quality>` or `awgn:<sigma>` (seed 0; override with
/// [`AttackSpec::with_noise_seed`]).
impl FromStr for AttackSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, param) = match s.split_once(':') {
            Some((k, p)) => {
                let v = p
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidAttack(format!("bad parameter in {s:?}")))?;
                (k.trim(), Some(v))
            }
            None => (s, None),
        };
        AttackSpec::from_parts(kind, param, 0)
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackSpec::None => write!(f, "none"),
            AttackSpec::Awgn { sigma, .. } => write!(f, "awgn:{sigma}"),
            AttackSpec::Jpeg { quality } => write!(f, "jpeg:{quality}"),
        }
    }
}

/// `len` samples of N(0, sigma²) via Box–Muller on consecutive 53-bit
/// uniforms. Each uniform pair yields two samples (cosine branch first).
pub fn gaussian_noise(len: usize, sigma: f64, noise_seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(noise_seed);
    let mut out = Vec::with_capacity(len + 1);
    while out.len() < len {
        // 1 - u keeps the log argument in (0, 1]
        let u1 = 1.0 - rng.next_unit();
        let u2 = rng.next_unit();
        let radius = sigma * (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * PI * u2;
        out.push(radius * theta.cos());
        out.push(radius * theta.sin());
    }
    out.truncate(len);
    out
}

/// Adds seeded white Gaussian noise and requantizes.
pub fn awgn(img: &Image, sigma: f64, noise_seed: u64) -> Result<Image> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::NegativeSigma(sigma));
    }
    let noise = gaussian_noise(img.pixels().len(), sigma, noise_seed);
    let pixels = img
        .pixels()
        .iter()
        .zip(&noise)
        .map(|(&p, &n)| quantize_sample(f64::from(p) + n))
        .collect();
    Image::new(img.width(), img.height(), pixels)
}

/// libjpeg-style quality scaling of the luminance table.
pub fn quant_table(quality: i64) -> Result<[u16; 64]> {
    if !(1..=100).contains(&quality) {
        return Err(Error::QualityOutOfRange(quality));
    }
    let scale = if quality < 50 {
        5000 / quality
    } else {
        200 - 2 * quality
    };
    let mut table = [0u16; 64];
    for (out, &base) in table.iter_mut().zip(&LUMINANCE_BASE_TABLE) {
        *out = ((i64::from(base) * scale + 50) / 100).clamp(1, 255) as u16;
    }
    Ok(table)
}

/// Blockwise DCT quantization at the given quality.
pub fn jpeg_attack(img: &Image, quality: i64) -> Result<Image> {
    let table = quant_table(quality)?;
    let side = img.side();
    if side % BLOCK != 0 {
        return Err(Error::DimensionUnsupported {
            width: img.width(),
            height: img.height(),
        });
    }
    let mut out = vec![0.0; side * side];
    let mut block = [0.0; BLOCK * BLOCK];
    for br in (0..side).step_by(BLOCK) {
        for bc in (0..side).step_by(BLOCK) {
            for r in 0..BLOCK {
                for c in 0..BLOCK {
                    block[r * BLOCK + c] = f64::from(img.get(br + r, bc + c)) - 128.0;
                }
            }
            dct2_2d(&mut block, BLOCK);
            for (coef, &q) in block.iter_mut().zip(&table) {
                let q = f64::from(q);
                *coef = (*coef / q).round() * q;
            }
            dct3_2d(&mut block, BLOCK);
            for r in 0..BLOCK {
                for c in 0..BLOCK {
                    out[(br + r) * side + bc + c] = block[r * BLOCK + c] + 128.0;
                }
            }
        }
    }
    quantize(&RealField::new(side, side, out)?)
}
