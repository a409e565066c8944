//! Keyed pseudo-randomness shared by embedder and extractor.
//!
//! Everything is driven by a single SplitMix64 stream, threaded explicitly
//! as a value. The stream layout of [`derive_plan`] is part of the
//! watermark format: a Fisher–Yates shuffle of the canonical block list
//! first, then `B` chips per message bit, in bit order. Reordering any of
//! these draws breaks compatibility with previously watermarked images.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::wave_atom::BlockAddress;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One SplitMix64 step: returns `(value, next_state)`.
pub fn prng_next(state: u64) -> (u64, u64) {
    let next = state.wrapping_add(GOLDEN_GAMMA);
    (mix(next), next)
}

/// Unbiased index in `[0, n)` by rejection: draws at or above
/// `floor(2^64 / n) * n` are discarded.
pub fn uniform_below(state: u64, n: u64) -> Result<(u64, u64)> {
    if n == 0 {
        return Err(Error::InvalidBound);
    }
    let limit = (1u128 << 64) / u128::from(n) * u128::from(n);
    let mut state = state;
    loop {
        let (value, next) = prng_next(state);
        state = next;
        if u128::from(value) < limit {
            return Ok((value % n, state));
        }
    }
}

/// SplitMix64 generator owning its state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        let (value, next) = prng_next(self.state);
        self.state = next;
        value
    }

    pub fn below(&mut self, n: u64) -> Result<u64> {
        let (value, next) = uniform_below(self.state, n)?;
        self.state = next;
        Ok(value)
    }

    /// Uniform in `[0, 1)` from the top 53 bits of one draw.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Secret 64-bit watermark key. Parses from decimal or `0x` hex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WatermarkKey(pub u64);

impl WatermarkKey {
    pub fn seed(&self) -> u64 {
        self.0
    }

    /// Key for the `index`-th member of a corpus: the `index + 1`-th
    /// SplitMix64 output seeded with this key.
    pub fn derive(&self, index: u64) -> WatermarkKey {
        let state = self.0.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA));
        WatermarkKey(prng_next(state).0)
    }
}

impl FromStr for WatermarkKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
            Some(hex) => u64::from_str_radix(hex, 16),
            None => t.parse::<u64>(),
        };
        parsed
            .map(WatermarkKey)
            .map_err(|_| Error::InvalidKey(s.to_string()))
    }
}

impl fmt::Display for WatermarkKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#018x}", self.0)
    }
}

/// Pseudo-random payload of `len` bits tied to `key`, used by evaluation
/// sweeps. Bit `i` is the top bit of the `i`-th draw of a stream seeded
/// with `key ^ PAYLOAD_SALT`.
pub fn payload_bits(key: WatermarkKey, len: usize) -> Vec<bool> {
    let mut rng = SplitMix64::new(key.seed() ^ PAYLOAD_SALT);
    (0..len).map(|_| rng.next_u64() >> 63 == 1).collect()
}

pub const PAYLOAD_SALT: u64 = 0x7061_796C_6F61_6421;

/// Block and chip sequence carrying one message bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub block: BlockAddress,
    /// Each entry is `+1` or `-1`.
    pub chips: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingPlan {
    pub assignments: Vec<Assignment>,
    /// Stream state after the last draw.
    pub final_state: u64,
}

impl EmbeddingPlan {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

/// Fisher–Yates shuffle (`i` from last index down to 1, swap with
/// `uniform_below(i + 1)`), advancing `rng`.
pub fn shuffle<T>(rng: &mut SplitMix64, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = rng.below(i as u64 + 1).expect("bound is positive") as usize;
        items.swap(i, j);
    }
}

/// Deterministic assignment of `bit_count` bits to distinct blocks plus
/// one chip sequence of length `block_size` per bit.
pub fn derive_plan(
    key: WatermarkKey,
    blocks: &[BlockAddress],
    bit_count: usize,
    block_size: usize,
) -> Result<EmbeddingPlan> {
    if bit_count > blocks.len() {
        return Err(Error::CapacityExceeded {
            requested: bit_count,
            capacity: blocks.len(),
        });
    }
    let mut rng = SplitMix64::new(key.seed());
    let mut order = blocks.to_vec();
    shuffle(&mut rng, &mut order);
    let assignments = order
        .into_iter()
        .take(bit_count)
        .map(|block| {
            let chips = (0..block_size)
                .map(|_| if rng.next_u64() >> 63 == 0 { 1 } else { -1 })
                .collect();
            Assignment { block, chips }
        })
        .collect();
    Ok(EmbeddingPlan {
        assignments,
        final_state: rng.state(),
    })
}
