//! Monte Carlo experiments and analytic helpers.
//!
//! Trials run in parallel, each on its own [`Rng::substream`] of the master
//! seed, and results are gathered by trial index, so a record depends only
//! on its inputs and never on scheduling.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::automaton::Dfa;
use crate::error::{argument, Result};
use crate::fastsync::{floor_pow, in_e, synchronize, Family, Stages, Thresholds};
use crate::funcgraph::decompose;
use crate::mapping::StateMapping;
use crate::oracle::is_synchronizing;
use crate::randgen::{
    linear_weights, random_permutation, uniform_dfa, uniform_mapping, weight_distribution, Rng,
};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Largest input accepted by [`sym_sum_check`].
pub const SYM_SUM_MAX_LEN: usize = 12;

/// Relative slack of [`sym_sum_check`].
pub const SYM_SUM_TOLERANCE: f64 = 1e-12;

/// A proportion with its 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Estimate {
    pub fn wilson(successes: u64, trials: u64) -> Self {
        assert!(trials > 0 && successes <= trials);
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z_95 * Z_95;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        let ci_low = if successes == 0 {
            0.0
        } else {
            (center - half).clamp(0.0, p)
        };
        let ci_high = if successes == trials {
            1.0
        } else {
            (center + half).clamp(p, 1.0)
        };
        Self {
            successes,
            trials,
            point: p,
            ci_low,
            ci_high,
        }
    }
}

/// `Π_{i=1}^{l-1} (1 - i/n)`: an upper bound on the probability that a
/// uniform random mapping of size `n` has `l` cyclic points.
pub fn p_bound(n: usize, l: usize) -> Result<f64> {
    if l > n {
        return Err(argument(format!("need l <= n (got n = {n}, l = {l})")));
    }
    let nf = n as f64;
    Ok((1..l).map(|i| 1.0 - i as f64 / nf).product())
}

/// `exp(-l(l-1)/2n)`, which dominates [`p_bound`].
pub fn p_bound_exp(n: usize, l: usize) -> f64 {
    let l = l as f64;
    (-(l * (l - 1.0)) / (2.0 * n as f64)).exp()
}

/// `Σ_{ℓ=l}^{n} P(n, ℓ)`, bounding the probability of at least `l` cyclic points.
pub fn cyclic_tail_bound(n: usize, l: usize) -> Result<f64> {
    if l == 0 || l > n {
        return Err(argument(format!("need 1 <= l <= n (got n = {n}, l = {l})")));
    }
    let nf = n as f64;
    let mut term = p_bound(n, l)?;
    let mut sum = 0.0;
    for m in l..=n {
        sum += term;
        term *= 1.0 - m as f64 / nf;
    }
    Ok(sum)
}

/// Both sides of the elementary symmetric sum inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymSumCheck {
    /// Sum over increasing `l`-tuples of the products of values.
    pub lhs: f64,
    /// `C(n, l) (s/n)^l` with `s` the total.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `e_l(values) <= C(n, l) (s/n)^l` by brute force over subsets.
pub fn sym_sum_check(values: &[f64], l: usize) -> Result<SymSumCheck> {
    let n = values.len();
    if n > SYM_SUM_MAX_LEN {
        return Err(argument(format!(
            "at most {SYM_SUM_MAX_LEN} values (got {n})"
        )));
    }
    if n == 0 || l > n {
        return Err(argument(format!(
            "need 0 <= l <= n with n >= 1 (got n = {n}, l = {l})"
        )));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(argument("values must be finite and nonnegative"));
    }
    let lhs: f64 = (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == l)
        .map(|mask| {
            (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| values[i])
                .product::<f64>()
        })
        .sum();
    let s: f64 = values.iter().sum();
    let rhs = binomial(n, l) * (s / n as f64).powi(l as i32);
    Ok(SymSumCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + SYM_SUM_TOLERANCE * rhs,
    })
}

fn binomial(n: usize, l: usize) -> f64 {
    let l = l.min(n - l);
    (0..l).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Runs `trials` independent trials; trial `i` draws from substream `i`.
pub fn run_trials<T, F>(trials: u64, master_seed: u64, trial: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut Rng) -> T + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| trial(i, &mut Rng::substream(master_seed, i)))
        .collect()
}

/// Fraction of sampled objects satisfying `predicate`.
pub fn estimate_event<T, S, P>(
    trials: u64,
    master_seed: u64,
    sample: S,
    predicate: P,
) -> Result<Estimate>
where
    S: Fn(&mut Rng) -> T + Sync,
    P: Fn(&T) -> bool + Sync,
{
    if trials == 0 {
        return Err(argument("need at least one trial"));
    }
    let hits = run_trials(trials, master_seed, |_, rng| predicate(&sample(rng)));
    Ok(Estimate::wilson(
        hits.iter().filter(|&&h| h).count() as u64,
        trials,
    ))
}

/// Outcome of one trial, one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial_index: u64,
    pub outcome: bool,
    pub word_length: Option<u64>,
    pub image_size_after_w: Option<usize>,
    pub in_e: Option<bool>,
    pub in_f: Option<bool>,
    pub in_g: Option<bool>,
    pub cyclic_points: Option<usize>,
    pub height: Option<usize>,
}

/// Result of one experiment.
///
/// Wall time and per-trial rows are kept out of the JSON form so that two
/// runs with the same inputs serialize identically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub n: usize,
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
    pub estimate: Estimate,
    pub aux: BTreeMap<String, f64>,
    #[serde(skip)]
    pub wall_time: Duration,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
}

impl ExperimentRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn csv_header() -> &'static str {
        "trial_index,n,epsilon,seed,outcome,word_length,image_size_after_w,in_e,in_f,in_g,cyclic_points,height"
    }

    /// One line per trial, without the header.
    pub fn csv_rows(&self) -> String {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(ToString::to_string).unwrap_or_default()
        }
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.trial_index,
                self.n,
                self.epsilon,
                self.seed,
                r.outcome,
                opt(&r.word_length),
                opt(&r.image_size_after_w),
                opt(&r.in_e),
                opt(&r.in_f),
                opt(&r.in_g),
                opt(&r.cyclic_points),
                opt(&r.height),
            ));
        }
        out
    }

    fn new(
        experiment: &str,
        n: usize,
        epsilon: f64,
        seed: u64,
        rows: Vec<TrialRow>,
        start: Instant,
    ) -> Self {
        let trials = rows.len() as u64;
        let hits = rows.iter().filter(|r| r.outcome).count() as u64;
        Self {
            experiment: experiment.to_string(),
            n,
            epsilon,
            trials,
            seed,
            estimate: Estimate::wilson(hits, trials),
            aux: BTreeMap::new(),
            wall_time: start.elapsed(),
            rows,
        }
    }
}

/// Law of the random mappings in [`lemma2_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub enum MappingLaw {
    Uniform,
    /// Images drawn with probability proportional to `1, ..., n`.
    Linear,
    Weights(Vec<f64>),
}

/// Frequency of mappings with more than `n^{1/2+ε}` cyclic points or height
/// above `n^{1/2+ε}`, next to the bound `exp(-n^ε)`.
pub fn lemma2_experiment(
    n: usize,
    epsilon: f64,
    trials: u64,
    seed: u64,
    law: &MappingLaw,
) -> Result<ExperimentRecord> {
    if n == 0 || trials == 0 || !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(argument("need n >= 1, trials >= 1 and epsilon > 0"));
    }
    let start = Instant::now();
    let weights = match law {
        MappingLaw::Uniform => None,
        MappingLaw::Linear => Some(linear_weights(n)),
        MappingLaw::Weights(w) if w.len() == n => Some(w.clone()),
        MappingLaw::Weights(w) => {
            return Err(argument(format!("{} weights for n = {n}", w.len())));
        }
    };
    let dist = weights.as_deref().map(weight_distribution).transpose()?;
    let limit = floor_pow(n, 0.5 + epsilon);

    let rows = run_trials(trials, seed, |i, rng| {
        let f = match &dist {
            None => uniform_mapping(n, rng).expect("n >= 1"),
            Some(d) => {
                use rand::distributions::Distribution;
                StateMapping::new((0..n).map(|_| d.sample(rng)).collect()).expect("in range")
            }
        };
        let dec = decompose(&f);
        let (c, h) = (dec.cyclic_count(), dec.height());
        TrialRow {
            trial_index: i,
            outcome: c as u64 > limit || h as u64 > limit,
            word_length: None,
            image_size_after_w: None,
            in_e: None,
            in_f: None,
            in_g: None,
            cyclic_points: Some(c),
            height: Some(h),
        }
    });

    let name = match law {
        MappingLaw::Uniform => "lemma2-uniform",
        MappingLaw::Linear => "lemma2-linear",
        MappingLaw::Weights(_) => "lemma2-weights",
    };
    let mut rec = ExperimentRecord::new(name, n, epsilon, seed, rows, start);
    let cyc: Vec<f64> = rec
        .rows
        .iter()
        .filter_map(|r| r.cyclic_points)
        .map(|c| c as f64)
        .collect();
    let hts: Vec<f64> = rec
        .rows
        .iter()
        .filter_map(|r| r.height)
        .map(|h| h as f64)
        .collect();
    rec.aux.insert("threshold".into(), limit as f64);
    rec.aux
        .insert("bound".into(), (-(n as f64).powf(epsilon)).exp());
    rec.aux.insert("mean_cyclic".into(), mean(&cyc));
    rec.aux.insert("max_cyclic".into(), max(&cyc));
    rec.aux.insert("mean_height".into(), mean(&hts));
    rec.aux.insert("max_height".into(), max(&hts));
    Ok(rec)
}

/// The analytic bound on the failure probability of each family check.
pub fn extension_bound(n: usize, epsilon: f64, family: Family) -> f64 {
    let nf = n as f64;
    match family {
        Family::E => (-nf.powf(epsilon)).exp(),
        Family::F | Family::G => 2.0 * nf.powf(-0.25 + 3.0 * epsilon),
    }
}

/// Frequency of uniform automata (k = 2) that do not extend an element of
/// the given family.
pub fn set_extension_experiment(
    n: usize,
    epsilon: f64,
    trials: u64,
    seed: u64,
    which: Family,
) -> Result<ExperimentRecord> {
    let t = Thresholds::compute(n, epsilon)?;
    if trials == 0 {
        return Err(argument("need at least one trial"));
    }
    let start = Instant::now();
    let rows = run_trials(trials, seed, |i, rng| {
        let d = uniform_dfa(n, 2, rng).expect("n >= 4");
        let (e, f, g) = match which {
            Family::E => (in_e(&d, &t).holds, None, None),
            Family::F | Family::G => {
                let s = Stages::analyze(&d, &t).expect("two letters");
                (s.e.holds, Some(s.f.holds), Some(s.g.holds))
            }
        };
        let member = match which {
            Family::E => e,
            Family::F => f.unwrap(),
            Family::G => g.unwrap(),
        };
        TrialRow {
            trial_index: i,
            outcome: !member,
            word_length: None,
            image_size_after_w: None,
            in_e: Some(e),
            in_f: f,
            in_g: g,
            cyclic_points: None,
            height: None,
        }
    });
    let name = format!("sets-{which:?}");
    let mut rec = ExperimentRecord::new(&name, n, epsilon, seed, rows, start);
    rec.aux
        .insert("bound".into(), extension_bound(n, epsilon, which));
    rec.aux.insert("alpha".into(), t.alpha as f64);
    rec.aux.insert("beta".into(), t.beta as f64);
    rec.aux.insert("gamma".into(), t.gamma as f64);
    Ok(rec)
}

/// Law of the automata in [`success_profile_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfaLaw {
    /// Uniform complete automata on two letters.
    Uniform,
    /// Both letters uniform random permutations.
    Permutations,
}

/// Success rate and word lengths of [`synchronize`] on uniform automata.
pub fn success_profile(n: usize, epsilon: f64, trials: u64, seed: u64) -> Result<ExperimentRecord> {
    success_profile_with(n, epsilon, trials, seed, DfaLaw::Uniform)
}

/// Largest `n` for which failed trials are checked with the exact oracle.
pub const ORACLE_CHECK_MAX_N: usize = 24;

pub fn success_profile_with(
    n: usize,
    epsilon: f64,
    trials: u64,
    seed: u64,
    law: DfaLaw,
) -> Result<ExperimentRecord> {
    Thresholds::compute(n, epsilon)?;
    if trials == 0 {
        return Err(argument("need at least one trial"));
    }
    let start = Instant::now();
    let outcomes = run_trials(trials, seed, |i, rng| {
        let d = match law {
            DfaLaw::Uniform => uniform_dfa(n, 2, rng).expect("n >= 4"),
            DfaLaw::Permutations => {
                let a = random_permutation(n, rng);
                let b = random_permutation(n, rng);
                Dfa::from_letter_actions(&[a, b]).expect("same size")
            }
        };
        let out = synchronize(&d, epsilon).expect("validated parameters");
        let r = out.report();
        let row = TrialRow {
            trial_index: i,
            outcome: out.is_synchronized(),
            word_length: out.certificate().map(|c| c.length),
            image_size_after_w: Some(r.image_after_w),
            in_e: Some(r.in_e),
            in_f: Some(r.in_f),
            in_g: Some(r.in_g),
            cyclic_points: Some(r.a_cyclic),
            height: Some(r.a_height),
        };
        let non_sync =
            (!out.is_synchronized() && n <= ORACLE_CHECK_MAX_N).then(|| !is_synchronizing(&d));
        (row, non_sync)
    });
    let checked = outcomes.iter().filter(|(_, c)| c.is_some()).count();
    let non_sync = outcomes.iter().filter(|(_, c)| *c == Some(true)).count();
    let rows: Vec<TrialRow> = outcomes.into_iter().map(|(r, _)| r).collect();

    let name = match law {
        DfaLaw::Uniform => "success",
        DfaLaw::Permutations => "success-permutations",
    };
    let mut rec = ExperimentRecord::new(name, n, epsilon, seed, rows, start);
    let mut lengths: Vec<f64> = rec
        .rows
        .iter()
        .filter_map(|r| r.word_length)
        .map(|l| l as f64)
        .collect();
    lengths.sort_by(f64::total_cmp);
    let images: Vec<f64> = rec
        .rows
        .iter()
        .filter_map(|r| r.image_size_after_w)
        .map(|s| s as f64)
        .collect();
    let rate = |f: fn(&TrialRow) -> Option<bool>| {
        rec.rows.iter().filter(|r| f(r) == Some(true)).count() as f64 / rec.trials as f64
    };
    let (e_rate, f_rate, g_rate) = (rate(|r| r.in_e), rate(|r| r.in_f), rate(|r| r.in_g));
    if !lengths.is_empty() {
        rec.aux.insert("length_min".into(), lengths[0]);
        rec.aux.insert("length_median".into(), median(&lengths));
        rec.aux
            .insert("length_max".into(), lengths[lengths.len() - 1]);
    }
    rec.aux
        .insert("length_bound".into(), (n as f64).powf(1.0 + 13.0 * epsilon));
    rec.aux.insert("mean_image_after_w".into(), mean(&images));
    rec.aux.insert("in_e_rate".into(), e_rate);
    rec.aux.insert("in_f_rate".into(), f_rate);
    rec.aux.insert("in_g_rate".into(), g_rate);
    rec.aux.insert("failures_checked".into(), checked as f64);
    rec.aux
        .insert("failures_not_synchronizing".into(), non_sync as f64);
    Ok(rec)
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn max(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(0.0, f64::max)
}

/// Median of sorted values.
fn median(sorted: &[f64]) -> f64 {
    let m = sorted.len();
    if m % 2 == 1 {
        sorted[m / 2]
    } else {
        (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0
    }
}
