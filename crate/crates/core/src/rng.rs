//! Portable seeded random stream.
//!
//! The generator is xoshiro256++ (Blackman & Vigna) with its 256-bit state
//! filled from the 64-bit seed by SplitMix64:
//!
//! ```text
//! splitmix64:  z = (s += 0x9E3779B97F4A7C15)
//!              z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!              z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!              return z ^ (z >> 31)
//! xoshiro256++: out = rotl(s0 + s3, 23) + s0
//!              t = s1 << 17
//!              s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t
//!              s3 = rotl(s3, 45)
//! ```
//!
//! Derived draws avoid library sampling routines so that the exact stream is
//! reproducible from the equations above: uniform reals are
//! `(next >> 11) * 2^-53` and bounded integers are `next % n`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[derive(Debug, Clone)]
pub struct SeededRng(Xoshiro256PlusPlus);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    /// Independent stream `index` under `seed`, seeded with
    /// `seed ^ (index * 0x9E3779B97F4A7C15)`.
    pub fn substream(seed: u64, index: u64) -> Self {
        Self::new(seed ^ index.wrapping_mul(0x9E3779B97F4A7C15))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform-ish integer in `[0, n)`; modulo bias is below 2^-40 for the
    /// sizes used here.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    /// Integer in `[lo, hi]`.
    pub fn range_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    /// Index drawn from a cumulative distribution whose last entry is 1.
    pub fn categorical(&mut self, cumulative: &[f64]) -> usize {
        let u = self.next_f64();
        cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(cumulative.len() - 1)
    }

    /// Fisher-Yates, swapping from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
