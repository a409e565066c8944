//! Discrete 2D wave atom transform, orthobasis frame.
//!
//! The transform works on the real cosine spectrum of the image (orthonormal
//! 2D DCT-II, computed with FFTs). The spectrum `[0, N)²` is tiled with
//! squares whose side grows like the square root of their distance from
//! the origin (parabolic scaling):
//!
//! * scale `j` owns the L-shaped corona `[0, K_j)² \ [0, K_{j-1})²` with
//!   `K_j = 4^j` (`K_0 = 0`, and `K_J = N` for the last scale `J`, the
//!   smallest `j` with `4^j >= N`);
//! * the corona is cut into tiles of side `w = 2^j`, addressed by the band
//!   index `(m1, m2)` = tile origin / `w`;
//! * each tile is brought back to a `w × w` spatial grid of translates by a
//!   small orthonormal inverse DCT.
//!
//! Every step is orthonormal, so the coefficient set has exactly `N²`
//! entries and preserves energy. For `N = 512` this yields five scales and
//! 240 scale-4 bands of 16×16 coefficients.

use std::fmt::Write as _;

use crate::dct::{dct2_2d, dct3_2d};
use crate::error::{Error, Result};
use crate::image_io::{check_dimensions, Image, RealField};

/// Address of one coefficient block (a scale band).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockAddress {
    pub scale: u32,
    pub m1: usize,
    pub m2: usize,
}

impl BlockAddress {
    pub fn new(scale: u32, m1: usize, m2: usize) -> Self {
        Self { scale, m1, m2 }
    }

    /// Side of the block's spatial grid, `2^scale`.
    pub fn side(&self) -> usize {
        1 << self.scale
    }

    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// One band `(scale, m1, m2)` with its `2^scale × 2^scale` grid of
/// coefficients, stored row-major (`n1` outer, `n2` inner).
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleBand {
    pub address: BlockAddress,
    pub grid: Vec<f64>,
}

impl ScaleBand {
    pub fn scale(&self) -> u32 {
        self.address.scale
    }

    pub fn band_index(&self) -> (usize, usize) {
        (self.address.m1, self.address.m2)
    }
}

/// Number of scales for side `n`: the smallest `j` with `4^j >= n`.
pub fn scale_count(n: usize) -> u32 {
    let mut j = 1;
    while 4usize.pow(j) < n {
        j += 1;
    }
    j
}

/// Frequency extent `[lo, hi)` of scale `j` along each axis.
fn corona(n: usize, j: u32) -> (usize, usize) {
    let last = scale_count(n);
    let lo = if j == 1 { 0 } else { 4usize.pow(j - 1) };
    let hi = if j == last { n } else { 4usize.pow(j) };
    (lo, hi)
}

/// Canonical band roster for side `n` and scale `j`, ascending by
/// `(m1, m2)`.
pub fn band_roster(n: usize, j: u32) -> Result<Vec<BlockAddress>> {
    let last = scale_count(n);
    if j == 0 || j > last {
        return Err(Error::ScaleOutOfRange {
            scale: j,
            max: last,
        });
    }
    let (lo, hi) = corona(n, j);
    let w = 1usize << j;
    let mut out = Vec::new();
    for m1 in 0..hi / w {
        for m2 in 0..hi / w {
            if m1.max(m2) * w >= lo {
                out.push(BlockAddress::new(j, m1, m2));
            }
        }
    }
    Ok(out)
}

fn full_roster(n: usize) -> Vec<BlockAddress> {
    (1..=scale_count(n))
        .flat_map(|j| band_roster(n, j).expect("scale in range"))
        .collect()
}

/// Wave atom coefficients of one image (the "cell array"). Bands are kept
/// sorted by `(scale, m1, m2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    size: usize,
    bands: Vec<ScaleBand>,
}

impl CoefficientSet {
    /// All-zero coefficients for side `size`.
    pub fn zeros(size: usize) -> Result<Self> {
        check_dimensions(size, size)?;
        let bands = full_roster(size)
            .into_iter()
            .map(|address| ScaleBand {
                grid: vec![0.0; address.len()],
                address,
            })
            .collect();
        Ok(Self { size, bands })
    }

    /// Assembles a set from explicit bands, checking that they form exactly
    /// the canonical roster for `size`.
    pub fn from_bands(size: usize, mut bands: Vec<ScaleBand>) -> Result<Self> {
        check_dimensions(size, size)?;
        bands.sort_by_key(|b| b.address);
        let roster = full_roster(size);
        if roster.len() != bands.len() {
            return Err(Error::MalformedCoefficients(format!(
                "expected {} bands for size {size}, got {}",
                roster.len(),
                bands.len()
            )));
        }
        for (want, band) in roster.iter().zip(&bands) {
            if *want != band.address {
                return Err(Error::MalformedCoefficients(format!(
                    "unexpected band {:?}",
                    band.address
                )));
            }
            if band.grid.len() != want.len() {
                return Err(Error::MalformedCoefficients(format!(
                    "band {:?} has {} coefficients, expected {}",
                    band.address,
                    band.grid.len(),
                    want.len()
                )));
            }
        }
        Ok(Self { size, bands })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn scales(&self) -> u32 {
        scale_count(self.size)
    }

    pub fn bands(&self) -> &[ScaleBand] {
        &self.bands
    }

    pub fn into_bands(self) -> Vec<ScaleBand> {
        self.bands
    }

    pub fn coefficient_count(&self) -> usize {
        self.bands.iter().map(|b| b.grid.len()).sum()
    }

    pub fn energy(&self) -> f64 {
        self.bands
            .iter()
            .flat_map(|b| b.grid.iter())
            .map(|c| c * c)
            .sum()
    }

    /// Bands of scale `j` in canonical order.
    pub fn list_blocks(&self, j: u32) -> Result<Vec<BlockAddress>> {
        band_roster(self.size, j)
    }

    fn position(&self, addr: BlockAddress) -> Result<usize> {
        self.bands
            .binary_search_by_key(&addr, |b| b.address)
            .map_err(|_| Error::UnknownBlock {
                scale: addr.scale,
                m1: addr.m1,
                m2: addr.m2,
            })
    }

    pub fn get_block(&self, addr: BlockAddress) -> Result<&[f64]> {
        let idx = self.position(addr)?;
        Ok(&self.bands[idx].grid)
    }

    pub fn block_mut(&mut self, addr: BlockAddress) -> Result<&mut [f64]> {
        let idx = self.position(addr)?;
        Ok(&mut self.bands[idx].grid)
    }

    pub fn set_block(&mut self, addr: BlockAddress, grid: &[f64]) -> Result<()> {
        let block = self.block_mut(addr)?;
        if block.len() != grid.len() {
            return Err(Error::BlockShapeMismatch {
                expected: block.len(),
                found: grid.len(),
            });
        }
        block.copy_from_slice(grid);
        Ok(())
    }

    /// Text dump with one `scale,m1,m2,n1,n2,value` row per coefficient,
    /// values printed in shortest round-trip form.
    pub fn debug_dump(&self) -> String {
        let mut out = String::from("scale,m1,m2,n1,n2,value\n");
        for band in &self.bands {
            let side = band.address.side();
            for (i, v) in band.grid.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{:?}",
                    band.address.scale,
                    band.address.m1,
                    band.address.m2,
                    i / side,
                    i % side,
                    v
                );
            }
        }
        out
    }
}

fn copy_tile(src: &[f64], stride: usize, r0: usize, c0: usize, w: usize) -> Vec<f64> {
    let mut tile = Vec::with_capacity(w * w);
    for r in 0..w {
        let start = (r0 + r) * stride + c0;
        tile.extend_from_slice(&src[start..start + w]);
    }
    tile
}

/// Forward transform of a real field.
pub fn forward_field(field: &RealField) -> Result<CoefficientSet> {
    let n = field.side();
    check_dimensions(field.width(), field.height())?;
    if let Some(idx) = field.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue(idx));
    }
    let mut spectrum = field.values().to_vec();
    dct2_2d(&mut spectrum, n);
    let bands = full_roster(n)
        .into_iter()
        .map(|address| {
            let w = address.side();
            let mut grid = copy_tile(&spectrum, n, address.m1 * w, address.m2 * w, w);
            dct3_2d(&mut grid, w);
            ScaleBand { address, grid }
        })
        .collect();
    Ok(CoefficientSet { size: n, bands })
}

/// Forward transform of an 8-bit image.
pub fn forward(img: &Image) -> Result<CoefficientSet> {
    forward_field(&img.to_field())
}

/// Exact inverse of [`forward_field`].
pub fn inverse(coeffs: &CoefficientSet) -> Result<RealField> {
    let n = coeffs.size;
    let roster = full_roster(n);
    if roster.len() != coeffs.bands.len()
        || roster
            .iter()
            .zip(&coeffs.bands)
            .any(|(a, b)| *a != b.address || b.grid.len() != a.len())
    {
        return Err(Error::MalformedCoefficients(format!(
            "band layout does not match size {n}"
        )));
    }
    let mut spectrum = vec![0.0; n * n];
    for band in &coeffs.bands {
        let w = band.address.side();
        let mut tile = band.grid.clone();
        dct2_2d(&mut tile, w);
        let (r0, c0) = (band.address.m1 * w, band.address.m2 * w);
        for r in 0..w {
            let start = (r0 + r) * n + c0;
            spectrum[start..start + w].copy_from_slice(&tile[r * w..(r + 1) * w]);
        }
    }
    dct3_2d(&mut spectrum, n);
    RealField::new(n, n, spectrum)
}
