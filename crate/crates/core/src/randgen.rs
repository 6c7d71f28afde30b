//! Seed-deterministic generation of random automata and mappings.
//!
//! The generator is xoshiro256++ (period 2^256 - 1). Every value drawn
//! goes through 64-bit integer arithmetic so streams are identical on all
//! platforms.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng as _, RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::automaton::{Dfa, PartialDfa};
use crate::error::{argument, Result};
use crate::mapping::StateMapping;

/// Tolerance on the total mass of a weight vector.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A single-owner pseudo-random stream.
#[derive(Debug, Clone)]
pub struct Rng(Xoshiro256PlusPlus);

impl Rng {
    pub fn from_seed(seed: u64) -> Self {
        Self(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    /// Stream for trial `index` under `master`.
    pub fn substream(master: u64, index: u64) -> Self {
        let key = mix64(master ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        Self::from_seed(key)
    }

    /// Uniform in `0..n`, unbiased (rejection sampling); `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n as u64) as usize
    }
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

/// Every transition drawn independently and uniformly, in row-major order.
pub fn uniform_dfa(n: usize, k: usize, rng: &mut Rng) -> Result<Dfa> {
    if n == 0 || k == 0 {
        return Err(argument(format!("need n >= 1 and k >= 1 (got {n}, {k})")));
    }
    let delta = (0..n * k).map(|_| rng.below(n)).collect();
    Dfa::new(n, k, delta)
}

pub fn uniform_mapping(n: usize, rng: &mut Rng) -> Result<StateMapping> {
    if n == 0 {
        return Err(argument("mapping size must be positive"));
    }
    Ok(StateMapping::from_targets_unchecked(
        (0..n).map(|_| rng.below(n)).collect(),
    ))
}

/// Every image drawn independently from the categorical law `weights`.
pub fn p_mapping(weights: &[f64], rng: &mut Rng) -> Result<StateMapping> {
    let dist = weight_distribution(weights)?;
    Ok(StateMapping::from_targets_unchecked(
        (0..weights.len()).map(|_| dist.sample(rng)).collect(),
    ))
}

/// Validated sampler for [`p_mapping`]-style draws, reusable across trials.
pub fn weight_distribution(weights: &[f64]) -> Result<WeightedIndex<f64>> {
    if weights.is_empty() {
        return Err(argument("weight vector is empty"));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(argument("weights must be finite and nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(argument(format!("weights sum to {total}, expected 1")));
    }
    WeightedIndex::new(weights).map_err(|e| argument(e.to_string()))
}

/// Weights proportional to `1, 2, ..., n`.
pub fn linear_weights(n: usize) -> Vec<f64> {
    let total = (n * (n + 1) / 2) as f64;
    (1..=n).map(|i| i as f64 / total).collect()
}

/// Fills undefined transitions uniformly, state-major then letter order.
pub fn complete_partial(p: &PartialDfa, rng: &mut Rng) -> Dfa {
    let n = p.n();
    let delta = p
        .table()
        .iter()
        .map(|t| t.unwrap_or_else(|| rng.below(n)))
        .collect();
    Dfa::new(n, p.k(), delta).expect("partial automaton has valid entries")
}

/// A uniformly random permutation of `0..n`.
pub fn random_permutation(n: usize, rng: &mut Rng) -> StateMapping {
    let mut targets: Vec<usize> = (0..n).collect();
    targets.shuffle(rng);
    StateMapping::from_targets_unchecked(targets)
}

/// The Černý automaton: `a` is `i -> i + 1 mod n`, `b` sends 0 to 1 and
/// fixes everything else. Its shortest reset word has length `(n - 1)^2`.
pub fn cerny(n: usize) -> Result<Dfa> {
    if n < 2 {
        return Err(argument(format!("Černý automaton needs n >= 2 (got {n})")));
    }
    let mut delta = Vec::with_capacity(2 * n);
    for q in 0..n {
        delta.push((q + 1) % n);
        delta.push(if q == 0 { 1 } else { q });
    }
    Dfa::new(n, 2, delta)
}
