//! Spread-spectrum watermark: message codec, embedding into one scale of
//! the wave atom coefficients, and blind correlation extraction.
//!
//! Bit `k` of the message is mapped to the antipodal symbol `b = +1` (bit 1)
//! or `-1` (bit 0) and added to every coefficient of its assigned block as
//! `c_i + alpha * b * chip_i`. Extraction correlates the same block with the
//! regenerated chips and compares against the threshold: `rho > T` decodes
//! as 1, anything else (ties included) as 0.

use crate::error::{Error, Result};
use crate::image_io::{check_dimensions, quantize, Image};
use crate::keystream::{derive_plan, EmbeddingPlan, WatermarkKey};
use crate::wave_atom::{self, band_roster, CoefficientSet};

/// Length of the big-endian byte-count header of a text message.
pub const HEADER_BITS: usize = 16;

/// Default embedding scale band.
pub const DEFAULT_SCALE: u32 = 4;

/// Ordered message bits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Message {
    pub bits: Vec<bool>,
}

impl Message {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bits rendered as a `0`/`1` string.
    pub fn to_bit_string(&self) -> String {
        bits_to_string(&self.bits)
    }
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedParams {
    /// Watermark strength, added per coefficient.
    pub alpha: f64,
    pub scale: u32,
    /// Detection threshold on the correlation.
    pub threshold: f64,
}

impl Default for EmbedParams {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            scale: DEFAULT_SCALE,
            threshold: 0.0,
        }
    }
}

impl EmbedParams {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidStrength(self.alpha));
        }
        Ok(())
    }
}

/// Text (as bytes) to bits: 16-bit big-endian length, then each byte MSB
/// first.
pub fn encode_message(text: &[u8]) -> Result<Message> {
    let len = u16::try_from(text.len()).map_err(|_| Error::MessageTooLong(text.len()))?;
    let mut bits = Vec::with_capacity(HEADER_BITS + 8 * text.len());
    let push_byte = |bits: &mut Vec<bool>, byte: u8| {
        bits.extend((0..8).rev().map(|i| (byte >> i) & 1 == 1));
    };
    for byte in len.to_be_bytes() {
        push_byte(&mut bits, byte);
    }
    for &byte in text {
        push_byte(&mut bits, byte);
    }
    Ok(Message { bits })
}

fn byte_at(bits: &[bool], offset: usize) -> u8 {
    bits[offset..offset + 8]
        .iter()
        .fold(0u8, |acc, &b| (acc << 1) | u8::from(b))
}

/// Declared payload length in bytes, read from the first 16 bits.
pub fn declared_length(bits: &[bool]) -> Result<usize> {
    if bits.len() < HEADER_BITS {
        return Err(Error::TruncatedMessage {
            declared: 0,
            available: bits.len(),
        });
    }
    Ok(usize::from(u16::from_be_bytes([
        byte_at(bits, 0),
        byte_at(bits, 8),
    ])))
}

/// Inverse of [`encode_message`]. The bit count must match the header
/// exactly.
pub fn decode_message(bits: &[bool]) -> Result<Vec<u8>> {
    let declared = declared_length(bits)?;
    let needed = HEADER_BITS + 8 * declared;
    let available = bits.len() - HEADER_BITS;
    if bits.len() < needed {
        return Err(Error::TruncatedMessage {
            declared,
            available,
        });
    }
    if bits.len() != needed {
        return Err(Error::LengthMismatch {
            left: needed,
            right: bits.len(),
        });
    }
    Ok((0..declared)
        .map(|i| byte_at(bits, HEADER_BITS + 8 * i))
        .collect())
}

/// Number of embeddable bits for an image side at `scale`.
pub fn capacity(side: usize, scale: u32) -> Result<usize> {
    check_dimensions(side, side)?;
    Ok(band_roster(side, scale)?.len())
}

/// Normalized correlation `(1/B) Σ block_i · chip_i`.
pub fn correlate(block: &[f64], chips: &[i8]) -> Result<f64> {
    if block.len() != chips.len() {
        return Err(Error::LengthMismatch {
            left: block.len(),
            right: chips.len(),
        });
    }
    if block.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sum: f64 = block
        .iter()
        .zip(chips)
        .map(|(&c, &chip)| c * f64::from(chip))
        .sum();
    Ok(sum / block.len() as f64)
}

fn plan_for(
    coeffs: &CoefficientSet,
    key: WatermarkKey,
    params: &EmbedParams,
    bit_count: usize,
) -> Result<EmbeddingPlan> {
    let blocks = coeffs.list_blocks(params.scale)?;
    let block_size = 1usize << (2 * params.scale);
    derive_plan(key, &blocks, bit_count, block_size)
}

/// Adds the spread-spectrum pattern of `bits` to `coeffs` in place.
pub fn embed_coefficients(
    coeffs: &mut CoefficientSet,
    key: WatermarkKey,
    params: &EmbedParams,
    bits: &[bool],
) -> Result<()> {
    params.validate()?;
    let plan = plan_for(coeffs, key, params, bits.len())?;
    for (assignment, &bit) in plan.assignments.iter().zip(bits) {
        let amplitude = if bit { params.alpha } else { -params.alpha };
        let block = coeffs.block_mut(assignment.block)?;
        for (c, &chip) in block.iter_mut().zip(&assignment.chips) {
            *c += amplitude * f64::from(chip);
        }
    }
    Ok(())
}

/// Per-bit correlations of `coeffs` against the keyed plan.
pub fn correlations(
    coeffs: &CoefficientSet,
    key: WatermarkKey,
    params: &EmbedParams,
    bit_count: usize,
) -> Result<Vec<f64>> {
    let plan = plan_for(coeffs, key, params, bit_count)?;
    plan.assignments
        .iter()
        .map(|a| correlate(coeffs.get_block(a.block)?, &a.chips))
        .collect()
}

/// Blind detection on coefficients.
pub fn extract_coefficients(
    coeffs: &CoefficientSet,
    key: WatermarkKey,
    params: &EmbedParams,
    bit_count: usize,
) -> Result<Vec<bool>> {
    Ok(correlations(coeffs, key, params, bit_count)?
        .into_iter()
        .map(|rho| rho > params.threshold)
        .collect())
}

/// Watermarks `img` with `msg`.
pub fn embed(img: &Image, key: WatermarkKey, params: &EmbedParams, msg: &Message) -> Result<Image> {
    params.validate()?;
    let mut coeffs = wave_atom::forward(img)?;
    embed_coefficients(&mut coeffs, key, params, &msg.bits)?;
    quantize(&wave_atom::inverse(&coeffs)?)
}

/// Recovers `bit_count` bits from a (possibly attacked) image using only
/// the key.
pub fn extract(
    img: &Image,
    key: WatermarkKey,
    params: &EmbedParams,
    bit_count: usize,
) -> Result<Vec<bool>> {
    let coeffs = wave_atom::forward(img)?;
    extract_coefficients(&coeffs, key, params, bit_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keystream::SplitMix64;
    use proptest::prelude::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().filter(|c| !c.is_whitespace()).map(|c| c == '1').collect()
    }

    #[test]
    fn encode_single_letter() {
        let m = encode_message(b"A").unwrap();
        assert_eq!(m.bits, bits("0000000000000001 01000001"));
        assert_eq!(m.len(), 24);
    }

    #[test]
    fn encode_empty() {
        assert_eq!(encode_message(b"").unwrap().bits, vec![false; 16]);
        assert_eq!(decode_message(&[false; 16]).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn encode_too_long() {
        let text = vec![0u8; 1 << 16];
        assert!(matches!(
            encode_message(&text),
            Err(Error::MessageTooLong(65536))
        ));
        assert!(encode_message(&text[1..]).is_ok());
    }

    #[test]
    fn decode_truncated_and_mismatched() {
        let mut b = bits("0000000000000101");
        b.extend(vec![true; 24]);
        assert!(matches!(
            decode_message(&b),
            Err(Error::TruncatedMessage {
                declared: 5,
                available: 24
            })
        ));
        let mut b = encode_message(b"hi").unwrap().bits;
        b.push(true);
        assert!(matches!(
            decode_message(&b),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            decode_message(&[true; 5]),
            Err(Error::TruncatedMessage { .. })
        ));
    }

    #[test]
    fn correlate_identities() {
        let mut rng = SplitMix64::new(5);
        let chips: Vec<i8> = (0..256)
            .map(|_| if rng.next_u64() >> 63 == 0 { 1 } else { -1 })
            .collect();
        let block: Vec<f64> = chips.iter().map(|&c| 2.5 * f64::from(c)).collect();
        assert!((correlate(&block, &chips).unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(correlate(&[0.0; 256], &chips).unwrap(), 0.0);
        assert!(matches!(
            correlate(&[0.0; 3], &chips),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn correlation_of_independent_block_is_small() {
        // Monte Carlo: zero-mean block of std 10 against independent chips
        let mut rng = SplitMix64::new(77);
        let sigma = 10.0;
        let mut sum = 0.0;
        let trials = 400;
        for _ in 0..trials {
            let block: Vec<f64> = (0..256)
                .map(|_| sigma * 3f64.sqrt() * (2.0 * rng.next_unit() - 1.0))
                .collect();
            let chips: Vec<i8> = (0..256)
                .map(|_| if rng.next_u64() >> 63 == 0 { 1 } else { -1 })
                .collect();
            let rho = correlate(&block, &chips).unwrap();
            assert!(rho.abs() <= 5.0 * sigma / 16.0);
            sum += rho;
        }
        let mean = sum / trials as f64;
        assert!(mean.abs() < 5.0 * sigma / 16.0 / (trials as f64).sqrt());
    }

    #[test]
    fn alpha_must_be_positive() {
        let img = Image::filled(512, 100).unwrap();
        let msg = Message::from_bits(vec![true]);
        for alpha in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                embed(&img, WatermarkKey(1), &EmbedParams::with_alpha(alpha), &msg),
                Err(Error::InvalidStrength(_))
            ));
        }
    }

    #[test]
    fn small_image_refuses_scale_four() {
        let img = Image::filled(64, 100).unwrap();
        let msg = Message::from_bits(vec![true]);
        assert!(matches!(
            embed(&img, WatermarkKey(1), &EmbedParams::default(), &msg),
            Err(Error::ScaleOutOfRange { scale: 4, max: 3 })
        ));
        assert_eq!(capacity(512, 4).unwrap(), 240);
        assert_eq!(capacity(128, 4).unwrap(), 48);
        assert!(capacity(64, 4).is_err());
    }

    #[test]
    fn capacity_exceeded_on_embed() {
        let img = Image::filled(128, 100).unwrap();
        let msg = Message::from_bits(vec![true; 49]);
        assert!(matches!(
            embed(&img, WatermarkKey(1), &EmbedParams::default(), &msg),
            Err(Error::CapacityExceeded {
                requested: 49,
                capacity: 48
            })
        ));
    }

    #[test]
    fn empty_message_leaves_image_unchanged() {
        let img = Image::from_fn(128, |r, c| (40 + (r * 7 + c * 3) % 150) as u8).unwrap();
        let out = embed(&img, WatermarkKey(9), &EmbedParams::default(), &Message::default()).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn threshold_tie_decodes_as_zero() {
        // an all-zero image correlates to exactly 0 everywhere
        let img = Image::filled(128, 0).unwrap();
        let got = extract(&img, WatermarkKey(4), &EmbedParams::default(), 20).unwrap();
        assert_eq!(got, vec![false; 20]);
    }

    proptest! {
        #[test]
        fn message_round_trip(text in proptest::collection::vec(any::<u8>(), 0..200)) {
            let m = encode_message(&text).unwrap();
            prop_assert_eq!(m.len(), 16 + 8 * text.len());
            prop_assert_eq!(decode_message(&m.bits).unwrap(), text);
        }

        #[test]
        fn coefficient_level_round_trip_is_exact(
            seed in any::<u64>(),
            alpha in 0.01f64..10.0,
            raw in proptest::collection::vec(any::<bool>(), 1..48),
        ) {
            // host is all zero, so correlation is exactly +/- alpha
            let mut coeffs = CoefficientSet::zeros(128).unwrap();
            let params = EmbedParams::with_alpha(alpha);
            embed_coefficients(&mut coeffs, WatermarkKey(seed), &params, &raw).unwrap();
            let rho = correlations(&coeffs, WatermarkKey(seed), &params, raw.len()).unwrap();
            for (r, &b) in rho.iter().zip(&raw) {
                let want = if b { alpha } else { -alpha };
                prop_assert!((r - want).abs() < 1e-12);
            }
        }
    }
}
