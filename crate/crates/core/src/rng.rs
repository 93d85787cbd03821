//! Deterministic pseudo-randomness for sampling and seeded trials.
//!
//! All randomness in this crate comes from SplitMix64 (Steele, Lea &
//! Flood's `splitmix64`), chosen because the algorithm is small enough to
//! restate here in full, which makes every sampled result reproducible in
//! any language:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15                    (golden-ratio increment)
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)
//! ```
//!
//! Floating-point draws take the top 53 bits of an output, giving a uniform
//! value in `[0, 1)`. Independent streams (per-trial seeds, worker seeds) are
//! derived with [`child_seed`], which returns the `(index+1)`-th raw output of
//! the generator seeded with the parent seed.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 generator state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform draw from `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform word on `n` parties. Exact, since `2^n` divides `2^64`.
    pub fn next_word(&mut self, n: usize) -> u16 {
        (self.next_u64() & ((1u64 << n) - 1)) as u16
    }
}

/// Derived seed for an independent stream: the `(index+1)`-th raw output of a
/// generator seeded with `seed`. Distinct indices give decorrelated streams.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    mix(seed.wrapping_add(GAMMA.wrapping_mul(index.wrapping_add(1))))
}
