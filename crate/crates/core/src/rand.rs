//! SplitMix64 splittable randomness.
//!
//! A [`Seed`] carries a 64-bit state word and an odd gamma. Every output is
//! `mix64(state += gamma)` using the variant-13 finalizer, and [`Seed::split`]
//! derives a child stream from two fresh state advances. Two implementations
//! of the arithmetic exist and are observationally identical:
//!
//! * [`Variant::Fast`] works directly on machine words.
//! * [`Variant::IndirectSlow`] stores each intermediate word of a draw in a
//!   freshly allocated cell and reads it back through a pointer, so one call
//!   to [`Seed::next_u64`] performs nine heap allocations. It exists only as
//!   the control arm of the fast-vs-slow randomness experiment.

use std::hint::black_box;

use crate::error::GenError;

/// Default SplitMix64 increment (the odd integer closest to 2^64 / phi).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

const MIX13_A: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX13_B: u64 = 0x94D0_49BB_1331_11EB;
const MIX4_A: u64 = 0xFF51_AFD7_ED55_8CCD;
const MIX4_B: u64 = 0xC4CE_B9FE_1A85_EC53;

/// Which arithmetic implementation a [`Seed`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Fast,
    IndirectSlow,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Fast, Variant::IndirectSlow];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Fast => "fast",
            Variant::IndirectSlow => "slow",
        }
    }
}

/// Mutable SplitMix64 stream state.
///
/// A seed is single-owner: it is advanced in place by every draw. Optional
/// instrumentation counts draws and generator binds; it is fixed when the
/// seed is built and inherited by children created with [`Seed::split`].
#[derive(Debug, Clone)]
pub struct Seed {
    state: u64,
    gamma: u64,
    variant: Variant,
    instrumented: bool,
    samples: u64,
    binds: u64,
}

/// Variant-13 finalizer.
#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX13_A);
    z = (z ^ (z >> 27)).wrapping_mul(MIX13_B);
    z ^ (z >> 31)
}

/// Derives an odd gamma with enough bit transitions.
#[inline]
pub fn mix_gamma(mut z: u64) -> u64 {
    z = (z ^ (z >> 33)).wrapping_mul(MIX4_A);
    z = (z ^ (z >> 33)).wrapping_mul(MIX4_B);
    z = (z ^ (z >> 33)) | 1;
    if (z ^ (z >> 1)).count_ones() < 24 {
        z ^ 0xAAAA_AAAA_AAAA_AAAA
    } else {
        z
    }
}

// Boxed arithmetic for the slow variant. `black_box` keeps the allocator
// from eliding the cells.
#[inline(never)]
fn cell(v: u64) -> Box<u64> {
    black_box(Box::new(v))
}

fn slow_mix64(z: &u64) -> Box<u64> {
    let a = cell(*z >> 30);
    let b = cell(*z ^ *a);
    let c = cell(b.wrapping_mul(MIX13_A));
    let d = cell(*c >> 27);
    let e = cell(*c ^ *d);
    let f = cell(e.wrapping_mul(MIX13_B));
    let g = cell(*f >> 31);
    cell(*f ^ *g)
}

fn slow_mix_gamma(z: &u64) -> Box<u64> {
    let a = cell(*z >> 33);
    let b = cell(*z ^ *a);
    let c = cell(b.wrapping_mul(MIX4_A));
    let d = cell(*c >> 33);
    let e = cell(*c ^ *d);
    let f = cell(e.wrapping_mul(MIX4_B));
    let g = cell(*f >> 33);
    let h = cell((*f ^ *g) | 1);
    let t = cell(*h >> 1);
    let x = cell(*h ^ *t);
    if x.count_ones() < 24 {
        cell(*h ^ 0xAAAA_AAAA_AAAA_AAAA)
    } else {
        h
    }
}

impl Seed {
    /// Seed with `state = value` and the golden gamma.
    pub fn from_u64(value: u64, variant: Variant) -> Seed {
        Seed::from_parts(value, GOLDEN_GAMMA, variant)
    }

    /// Seed from raw parts. The low bit of `gamma` is forced on.
    pub fn from_parts(state: u64, gamma: u64, variant: Variant) -> Seed {
        Seed {
            state,
            gamma: gamma | 1,
            variant,
            instrumented: false,
            samples: 0,
            binds: 0,
        }
    }

    /// Turns on draw and bind counting.
    pub fn instrumented(mut self) -> Seed {
        self.instrumented = true;
        self
    }

    pub fn is_instrumented(&self) -> bool {
        self.instrumented
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    /// `(state, gamma)`; equal pairs produce equal futures.
    pub fn position(&self) -> (u64, u64) {
        (self.state, self.gamma)
    }

    /// Number of [`Seed::next_u64`] calls, if instrumented.
    pub fn sample_count(&self) -> Option<u64> {
        self.instrumented.then_some(self.samples)
    }

    /// Number of generator binds recorded, if instrumented.
    pub fn bind_count(&self) -> Option<u64> {
        self.instrumented.then_some(self.binds)
    }

    #[inline(always)]
    pub fn record_bind(&mut self) {
        if self.instrumented {
            self.binds += 1;
        }
    }

    #[inline(always)]
    fn next_seed(&mut self) -> u64 {
        match self.variant {
            Variant::Fast => {
                self.state = self.state.wrapping_add(self.gamma);
                self.state
            }
            Variant::IndirectSlow => {
                let s = cell(self.state.wrapping_add(self.gamma));
                self.state = *s;
                self.state
            }
        }
    }

    /// Next 64-bit output.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        if self.instrumented {
            self.samples += 1;
        }
        match self.variant {
            Variant::Fast => {
                self.state = self.state.wrapping_add(self.gamma);
                mix64(self.state)
            }
            Variant::IndirectSlow => self.next_u64_slow(),
        }
    }

    #[inline(never)]
    fn next_u64_slow(&mut self) -> u64 {
        let s = cell(self.state.wrapping_add(self.gamma));
        self.state = *s;
        *slow_mix64(&s)
    }

    /// Splits off an independent child stream. The parent advances twice.
    pub fn split(&mut self) -> Seed {
        let a = self.next_seed();
        let b = self.next_seed();
        let (state, gamma) = match self.variant {
            Variant::Fast => (mix64(a), mix_gamma(b)),
            Variant::IndirectSlow => (*slow_mix64(&a), *slow_mix_gamma(&b)),
        };
        Seed {
            state,
            gamma,
            variant: self.variant,
            instrumented: self.instrumented,
            samples: 0,
            binds: 0,
        }
    }

    /// Uniform draw from `[lo, hi]` by bitmask rejection.
    ///
    /// A singleton range returns `lo` without drawing. The full 64-bit range
    /// returns one raw output. Otherwise outputs are masked to the smallest
    /// `2^k - 1` covering `hi - lo` and redrawn until in range.
    #[inline]
    pub fn int_in_range(&mut self, lo: i64, hi: i64) -> Result<i64, GenError> {
        if lo > hi {
            return Err(GenError::InvalidRange { lo, hi });
        }
        let span = (hi as u64).wrapping_sub(lo as u64);
        if span == 0 {
            return Ok(lo);
        }
        if span == u64::MAX {
            return Ok(self.next_u64() as i64);
        }
        let range = span + 1;
        let mask = u64::MAX >> span.leading_zeros();
        loop {
            let draw = self.next_u64() & mask;
            if draw < range {
                return Ok(lo.wrapping_add(draw as i64));
            }
        }
    }

    /// Fair coin via `int_in_range(0, 1)`.
    #[inline]
    pub fn coin(&mut self) -> bool {
        // a two-element range never fails
        self.int_in_range(0, 1).unwrap_or(0) == 1
    }
}

impl PartialEq for Seed {
    fn eq(&self, other: &Seed) -> bool {
        self.position() == other.position()
    }
}

impl Eq for Seed {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_output_of_zero_seed() {
        let mut s = Seed::from_u64(0, Variant::Fast);
        assert_eq!(s.next_u64(), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn gamma_is_odd() {
        let s = Seed::from_u64(42, Variant::Fast);
        assert_eq!(s.gamma() & 1, 1);
        let s = Seed::from_parts(1, 2, Variant::Fast);
        assert_eq!(s.gamma() & 1, 1);
    }

    #[test]
    fn singleton_range_draws_nothing() {
        let mut s = Seed::from_u64(9, Variant::Fast).instrumented();
        assert_eq!(s.int_in_range(5, 5).unwrap(), 5);
        assert_eq!(s.sample_count(), Some(0));
    }

    #[test]
    fn inverted_range_is_an_error() {
        let mut s = Seed::from_u64(9, Variant::Fast);
        assert_eq!(s.int_in_range(3, 2), Err(GenError::InvalidRange { lo: 3, hi: 2 }));
    }

    #[test]
    fn full_range_takes_one_raw_output() {
        let mut a = Seed::from_u64(5, Variant::Fast).instrumented();
        let mut b = a.clone();
        let v = a.int_in_range(i64::MIN, i64::MAX).unwrap();
        assert_eq!(v as u64, b.next_u64());
        assert_eq!(a.sample_count(), Some(1));
    }

    #[test]
    fn extreme_bounds_stay_in_range() {
        let mut s = Seed::from_u64(77, Variant::Fast);
        for _ in 0..1000 {
            let v = s.int_in_range(i64::MIN, i64::MIN + 2).unwrap();
            assert!((i64::MIN..=i64::MIN + 2).contains(&v));
            let v = s.int_in_range(i64::MAX - 6, i64::MAX).unwrap();
            assert!(v >= i64::MAX - 6);
        }
    }

    #[test]
    fn instrumentation_counts_only_when_enabled() {
        let mut plain = Seed::from_u64(3, Variant::Fast);
        let mut counted = Seed::from_u64(3, Variant::Fast).instrumented();
        for _ in 0..17 {
            assert_eq!(plain.next_u64(), counted.next_u64());
        }
        counted.record_bind();
        plain.record_bind();
        assert_eq!(plain.sample_count(), None);
        assert_eq!(plain.bind_count(), None);
        assert_eq!(counted.sample_count(), Some(17));
        assert_eq!(counted.bind_count(), Some(1));
    }

    #[test]
    fn split_children_inherit_variant_and_odd_gamma() {
        let mut s = Seed::from_u64(0, Variant::IndirectSlow);
        for _ in 0..100 {
            let c = s.split();
            assert_eq!(c.variant(), Variant::IndirectSlow);
            assert_eq!(c.gamma() & 1, 1);
        }
    }
}
