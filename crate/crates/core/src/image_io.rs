//! 8-bit grayscale images, binary PGM (P5) I/O and requantization of real
//! valued pixel fields.
//!
//! Every image handled by the toolkit is square with a power-of-two side of
//! at least [`MIN_SIDE`] pixels. Inputs that do not satisfy this are
//! rejected rather than padded.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Smallest accepted image side.
pub const MIN_SIDE: usize = 32;

pub(crate) fn check_dimensions(width: usize, height: usize) -> Result<()> {
    if width != height || width < MIN_SIDE || !width.is_power_of_two() {
        return Err(Error::DimensionUnsupported { width, height });
    }
    Ok(())
}

/// Square 8-bit grayscale image, row-major, top-left origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dimensions(width, height)?;
        if pixels.len() != width * height {
            return Err(Error::PixelCountMismatch {
                width,
                height,
                found: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Image of side `side` filled with `value`.
    pub fn filled(side: usize, value: u8) -> Result<Self> {
        Self::new(side, side, vec![value; side * side])
    }

    pub fn from_fn(side: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut pixels = Vec::with_capacity(side * side);
        for row in 0..side {
            for col in 0..side {
                pixels.push(f(row, col));
            }
        }
        Self::new(side, side, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Side length (width == height).
    pub fn side(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// Lossless widening to a real field.
    pub fn to_field(&self) -> RealField {
        RealField {
            width: self.width,
            height: self.height,
            values: self.pixels.iter().map(|&p| f64::from(p)).collect(),
        }
    }
}

/// Unclamped real-valued pixel data, e.g. inverse transform output before
/// requantization.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_dimensions(width, height)?;
        if values.len() != width * height {
            return Err(Error::PixelCountMismatch {
                width,
                height,
                found: values.len(),
            });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn zeros(side: usize) -> Result<Self> {
        Self::new(side, side, vec![0.0; side * side])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn side(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Largest absolute value, 0 for an all-zero field.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

impl From<&Image> for RealField {
    fn from(img: &Image) -> Self {
        img.to_field()
    }
}

/// Rounds half away from zero, then clamps to `[0, 255]`.
pub fn quantize_sample(value: f64) -> u8 {
    value.round().clamp(0.0, 255.0) as u8
}

/// Requantizes a real field to 8-bit pixels.
pub fn quantize(field: &RealField) -> Result<Image> {
    if let Some(idx) = field.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue(idx));
    }
    Ok(Image {
        width: field.width,
        height: field.height,
        pixels: field.values.iter().map(|&v| quantize_sample(v)).collect(),
    })
}

/// Byte cursor over a PGM header that skips whitespace and `#` comments.
struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_separators();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        let digits = &self.bytes[start..self.pos];
        if digits.is_empty() {
            return Err(Error::MalformedHeader(format!("expected numeric {what}")));
        }
        std::str::from_utf8(digits)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedHeader(format!("{what} out of range")))
    }
}

/// Parses a binary PGM (P5, maxval 255). Comments are allowed anywhere
/// in the header.
pub fn read_pgm(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::MalformedHeader("missing P5 magic".into()));
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    if !cur.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(Error::MalformedHeader("missing P5 magic".into()));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(Error::MalformedHeader(format!(
            "maxval {maxval} unsupported (only 255)"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        Some(_) => return Err(Error::MalformedHeader("garbage after maxval".into())),
        None => {}
    }
    check_dimensions(width, height)?;
    let expected = width * height;
    let payload = &bytes[cur.pos.min(bytes.len())..];
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    Image::new(width, height, payload[..expected].to_vec())
}

/// Serializes with the canonical header `P5\n<w> <h>\n255\n`.
pub fn write_pgm(img: &Image) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&img.pixels);
    out
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_pgm(&bytes)
}

pub fn save_pgm(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_pgm(img)).map_err(|e| Error::io(path, e))
}
