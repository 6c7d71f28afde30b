//! Fast synchronization of random automata.
//!
//! The word `u = a^α` sends every state to a cyclic point of `δ_a`. On those
//! points, `f_B = δ_{bu}` behaves like a random mapping with few cyclic
//! points, so `v = u(bu)^β` reduces the set further; `g_C = δ_{bbv}` on the
//! `f_B`-cyclic points does it once more through `w = v(bbv)^γ`. The few
//! states left in the image of `δ_w` are then merged two at a time by words
//! `b^j w` with `j <= λ`.
//!
//! The membership checks [`in_e`], [`in_f`] and [`in_g`] report whether an
//! automaton extends an element of the nested families under which each
//! reduction provably succeeds. [`synchronize`] records them but does not
//! depend on them.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::automaton::{Dfa, PartialDfa, LETTER_A, LETTER_B};
use crate::certificate::{verify_certificate, SyncCertificate};
use crate::error::{argument, Error, Result};
use crate::funcgraph::{decompose, sub_restrict, CycleDecomposition, SubMapping};
use crate::mapping::StateMapping;
use crate::word::CompressedWord;

/// Relative nudge applied before flooring, so that exact powers computed as
/// `127.99999999999997` still floor to 128.
const FLOOR_NUDGE: f64 = 1e-12;

/// `floor(n^exponent)`, robust to rounding just below an exact integer.
pub fn floor_pow(n: usize, exponent: f64) -> u64 {
    let x = (n as f64).powf(exponent);
    (x * (1.0 + FLOOR_NUDGE)).floor() as u64
}

/// Word-size parameters for a given state count and ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub epsilon: f64,
    /// `⌊n^{1/2+ε}⌋`
    pub alpha: u64,
    /// `⌊n^{1/4+2ε}⌋`
    pub beta: u64,
    /// `⌊n^{1/8+4ε}⌋`
    pub gamma: u64,
    /// `⌊n^{1/8+5ε}⌋`
    pub lambda: u64,
}

impl Thresholds {
    /// Requires `n >= 4` and `0 < ε < 1/8`.
    pub fn compute(n: usize, epsilon: f64) -> Result<Self> {
        if n < 4 {
            return Err(argument(format!("thresholds need n >= 4 (got {n})")));
        }
        if !(epsilon > 0.0 && epsilon < 0.125) {
            return Err(argument(format!(
                "epsilon must lie in (0, 1/8) (got {epsilon})"
            )));
        }
        Self::from_exponents(n, epsilon)
    }

    /// Same floors without the range restrictions; only `n >= 1` and `ε > 0`.
    pub fn from_exponents(n: usize, epsilon: f64) -> Result<Self> {
        if n == 0 || !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(argument(format!(
                "need n >= 1 and epsilon > 0 (got {n}, {epsilon})"
            )));
        }
        Ok(Self {
            epsilon,
            alpha: floor_pow(n, 0.5 + epsilon),
            beta: floor_pow(n, 0.25 + 2.0 * epsilon),
            gamma: floor_pow(n, 0.125 + 4.0 * epsilon),
            lambda: floor_pow(n, 0.125 + 5.0 * epsilon),
        })
    }

    /// Hand-picked values, for small hand-checked cases.
    pub fn explicit(epsilon: f64, alpha: u64, beta: u64, gamma: u64, lambda: u64) -> Self {
        Self {
            epsilon,
            alpha,
            beta,
            gamma,
            lambda,
        }
    }
}

/// See [`Thresholds::compute`].
pub fn thresholds(n: usize, epsilon: f64) -> Result<Thresholds> {
    Thresholds::compute(n, epsilon)
}

/// The three reduction words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredWords {
    /// `a^α`
    pub u: CompressedWord,
    /// `u(bu)^β`
    pub v: CompressedWord,
    /// `v(bbv)^γ`
    pub w: CompressedWord,
}

pub fn build_words(t: &Thresholds) -> Result<StructuredWords> {
    let a = CompressedWord::letter(LETTER_A);
    let b = CompressedWord::letter(LETTER_B);
    let u = match t.alpha {
        1 => a,
        alpha => CompressedWord::power(a, alpha)?,
    };
    let v = match t.beta {
        0 => u.clone(),
        beta => CompressedWord::concat(vec![
            u.clone(),
            CompressedWord::power(CompressedWord::concat(vec![b.clone(), u.clone()])?, beta)?,
        ])?,
    };
    let w = match t.gamma {
        0 => v.clone(),
        gamma => CompressedWord::concat(vec![
            v.clone(),
            CompressedWord::power(
                CompressedWord::concat(vec![b.clone(), b, v.clone()])?,
                gamma,
            )?,
        ])?,
    };
    Ok(StructuredWords { u, v, w })
}

/// Which family a condition belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    E,
    F,
    G,
}

/// A numbered membership condition, displayed as e.g. `F4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Condition {
    pub family: Family,
    pub number: u8,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.number)
    }
}

impl Serialize for Condition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

const fn cond(family: Family, number: u8) -> Condition {
    Condition { family, number }
}

/// Outcome of a membership check, with every violated condition.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MembershipCheck {
    pub holds: bool,
    pub violated: Vec<Condition>,
}

impl MembershipCheck {
    fn from_violations(violated: Vec<Condition>) -> Self {
        Self {
            holds: violated.is_empty(),
            violated,
        }
    }

    /// True if some condition of `family` failed.
    pub fn violates(&self, family: Family) -> bool {
        self.violated.iter().any(|c| c.family == family)
    }
}

/// Number of states sent to each state, with the induced distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreimageDistribution {
    counts: Vec<usize>,
}

impl PreimageDistribution {
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn probability(&self, q: usize) -> f64 {
        self.counts[q] as f64 / self.counts.len() as f64
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.counts.len())
            .map(|q| self.probability(q))
            .collect()
    }
}

/// For each `q`, `|f^{-1}(q)| / n`.
pub fn preimage_distribution(f: &StateMapping) -> PreimageDistribution {
    let mut counts = vec![0usize; f.len()];
    for &t in f.targets() {
        counts[t] += 1;
    }
    PreimageDistribution { counts }
}

/// Conditions 1 to 3 on an automaton with only `a`-transitions.
pub fn in_e_partial(d: &PartialDfa, t: &Thresholds) -> Result<MembershipCheck> {
    let a = d.letter_action(LETTER_A)?;
    let mut violated = Vec::new();
    let others_defined =
        (0..d.n()).any(|q| (0..d.k()).any(|l| l != LETTER_A && d.get(q, l).is_some()));
    if others_defined {
        violated.push(cond(Family::E, 1));
    }
    violated.extend(e_conditions(&decompose(&a), t));
    Ok(MembershipCheck::from_violations(violated))
}

/// Whether a complete automaton extends an element of the E family.
pub fn in_e(d: &Dfa, t: &Thresholds) -> MembershipCheck {
    let a = d.letter_action(LETTER_A).expect("letter a exists");
    MembershipCheck::from_violations(e_conditions(&decompose(&a), t))
}

fn e_conditions(a: &CycleDecomposition, t: &Thresholds) -> Vec<Condition> {
    let mut violated = Vec::new();
    if a.cyclic_count() as u64 > t.alpha {
        violated.push(cond(Family::E, 2));
    }
    if a.height() as u64 > t.alpha {
        violated.push(cond(Family::E, 3));
    }
    violated
}

/// Whether a complete automaton extends an element of the F family.
pub fn in_f(d: &Dfa, t: &Thresholds) -> Result<MembershipCheck> {
    Ok(Stages::analyze(d, t)?.f)
}

/// Whether a complete automaton extends an element of the G family.
pub fn in_g(d: &Dfa, t: &Thresholds) -> Result<MembershipCheck> {
    Ok(Stages::analyze(d, t)?.g)
}

/// Smallest `j <= lambda` such that `b^j w` merges `p` and `q`.
pub fn merge_pair(
    p: usize,
    q: usize,
    w_map: &StateMapping,
    b_map: &StateMapping,
    lambda: u64,
) -> Option<u64> {
    let (mut p, mut q) = (p, q);
    for j in 0..=lambda {
        if w_map.apply(p) == w_map.apply(q) {
            return Some(j);
        }
        p = b_map.apply(p);
        q = b_map.apply(q);
    }
    None
}

/// Actions of the structured words and the stage-by-stage diagnostics.
#[derive(Debug, Clone)]
pub struct Stages {
    pub thresholds: Thresholds,
    pub a_map: StateMapping,
    pub b_map: StateMapping,
    pub u_map: StateMapping,
    pub v_map: StateMapping,
    pub w_map: StateMapping,
    pub a_cyclic: usize,
    pub a_height: usize,
    /// `δ_{bu}` on the `δ_a`-cyclic states, when that set is closed under it.
    pub f_b: Option<SubMapping>,
    /// `δ_{bbv}` on the `f_B`-cyclic states, when that set is closed under it.
    pub g_c: Option<SubMapping>,
    pub e: MembershipCheck,
    pub f: MembershipCheck,
    pub g: MembershipCheck,
}

impl Stages {
    pub fn analyze(d: &Dfa, t: &Thresholds) -> Result<Self> {
        if d.k() < 2 {
            return Err(argument("the fast path needs at least two letters"));
        }
        let a_map = d.letter_action(LETTER_A)?;
        let b_map = d.letter_action(LETTER_B)?;
        let a_dec = decompose(&a_map);

        let u_map = a_map.power(t.alpha);
        let bu = b_map.then(&u_map)?;
        let v_map = u_map.then(&bu.power(t.beta))?;
        let bbv = b_map.then(&b_map)?.then(&v_map)?;
        let w_map = v_map.then(&bbv.power(t.gamma))?;

        let e_violations = e_conditions(&a_dec, t);
        let e = MembershipCheck::from_violations(e_violations.clone());

        let cyc_a = a_dec.cyclic_points();
        let f_b = sub_restrict(&bu, &cyc_a).ok();
        let mut f_violations = e_violations;
        let mut cyc_f = Vec::new();
        match &f_b {
            Some(fb) => {
                let dec = fb.decompose();
                if dec.cyclic_count() as u64 > t.beta || dec.height() as u64 > t.beta {
                    f_violations.push(cond(Family::F, 3));
                }
                cyc_f = fb.cyclic_points();
                if cyc_f.iter().any(|&q| a_dec.is_cyclic(b_map.apply(q))) {
                    f_violations.push(cond(Family::F, 4));
                }
            }
            // Only reachable when the height of δ_a exceeds α, already an E3 violation.
            None => f_violations.push(cond(Family::F, 3)),
        }
        let f = MembershipCheck::from_violations(f_violations.clone());

        let g_c = if f_b.is_some() {
            sub_restrict(&bbv, &cyc_f).ok()
        } else {
            None
        };
        let mut g_violations = f_violations;
        match &g_c {
            Some(gc) => {
                let dec = gc.decompose();
                if dec.cyclic_count() as u64 > t.gamma || dec.height() as u64 > t.gamma {
                    g_violations.push(cond(Family::G, 3));
                }
                let x_b: HashSet<usize> = cyc_f.iter().map(|&q| b_map.apply(q)).collect();
                let blocked = gc.cyclic_points().into_iter().any(|q| {
                    let r = b_map.apply(b_map.apply(q));
                    a_dec.is_cyclic(r) || x_b.contains(&r)
                });
                if blocked {
                    g_violations.push(cond(Family::G, 4));
                }
            }
            None => g_violations.push(cond(Family::G, 3)),
        }
        let g = MembershipCheck::from_violations(g_violations);

        Ok(Self {
            thresholds: *t,
            a_cyclic: a_dec.cyclic_count(),
            a_height: a_dec.height(),
            a_map,
            b_map,
            u_map,
            v_map,
            w_map,
            f_b,
            g_c,
            e,
            f,
            g,
        })
    }
}

/// Diagnostics of one run of [`synchronize`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub n: usize,
    pub k: usize,
    pub thresholds: Thresholds,
    pub u_length: u64,
    pub v_length: u64,
    pub w_length: u64,
    /// `|Cyc_a|`
    pub a_cyclic: usize,
    pub a_height: usize,
    pub fb_cyclic: Option<usize>,
    pub fb_height: Option<usize>,
    pub gc_cyclic: Option<usize>,
    pub gc_height: Option<usize>,
    pub in_e: bool,
    pub in_f: bool,
    pub in_g: bool,
    pub violated: Vec<Condition>,
    /// `|image(δ_w)|`
    pub image_after_w: usize,
    pub merge_attempts: usize,
    pub merge_failures: usize,
    /// Exponents `j` of the successful merges, in order.
    pub merge_exponents: Vec<u64>,
    /// The pair that did not merge within λ steps.
    pub failed_pair: Option<(usize, usize)>,
    pub word_length: Option<u64>,
}

impl StageReport {
    fn trivial(d: &Dfa, t: Thresholds) -> Self {
        Self {
            n: d.n(),
            k: d.k(),
            thresholds: t,
            u_length: 0,
            v_length: 0,
            w_length: 0,
            a_cyclic: 1,
            a_height: 0,
            fb_cyclic: None,
            fb_height: None,
            gc_cyclic: None,
            gc_height: None,
            in_e: true,
            in_f: true,
            in_g: true,
            violated: Vec::new(),
            image_after_w: 1,
            merge_attempts: 0,
            merge_failures: 0,
            merge_exponents: Vec::new(),
            failed_pair: None,
            word_length: Some(0),
        }
    }

    fn from_stages(d: &Dfa, s: &Stages, words: &StructuredWords) -> Self {
        let fb = s.f_b.as_ref().map(SubMapping::decompose);
        let gc = s.g_c.as_ref().map(SubMapping::decompose);
        Self {
            n: d.n(),
            k: d.k(),
            thresholds: s.thresholds,
            u_length: words.u.len(),
            v_length: words.v.len(),
            w_length: words.w.len(),
            a_cyclic: s.a_cyclic,
            a_height: s.a_height,
            fb_cyclic: fb.as_ref().map(CycleDecomposition::cyclic_count),
            fb_height: fb.as_ref().map(CycleDecomposition::height),
            gc_cyclic: gc.as_ref().map(CycleDecomposition::cyclic_count),
            gc_height: gc.as_ref().map(CycleDecomposition::height),
            in_e: s.e.holds,
            in_f: s.f.holds,
            in_g: s.g.holds,
            violated: s.g.violated.clone(),
            image_after_w: 0,
            merge_attempts: 0,
            merge_failures: 0,
            merge_exponents: Vec::new(),
            failed_pair: None,
            word_length: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Result of [`synchronize`].
#[derive(Debug, Clone, PartialEq)]
pub enum SyncOutcome {
    Synchronized {
        certificate: SyncCertificate,
        report: StageReport,
    },
    /// Some pair of the image of `δ_w` did not merge within λ steps of `b`.
    /// The automaton may still be synchronizing.
    MergeFailed { report: StageReport },
}

impl SyncOutcome {
    pub fn certificate(&self) -> Option<&SyncCertificate> {
        match self {
            Self::Synchronized { certificate, .. } => Some(certificate),
            Self::MergeFailed { .. } => None,
        }
    }

    pub fn report(&self) -> &StageReport {
        match self {
            Self::Synchronized { report, .. } | Self::MergeFailed { report } => report,
        }
    }

    pub fn is_synchronized(&self) -> bool {
        matches!(self, Self::Synchronized { .. })
    }
}

/// Finds a synchronizing word of the form `w (b^{j_1} w) ... (b^{j_m} w)`.
///
/// Needs `k >= 2`, `n >= 4` and `0 < ε < 1/8`; the one-state automaton is
/// accepted as well and gets the empty word. Letters past `b` are unused.
/// The certificate is verified before it is returned.
pub fn synchronize(d: &Dfa, epsilon: f64) -> Result<SyncOutcome> {
    if d.k() < 2 {
        return Err(argument("the fast path needs at least two letters"));
    }
    if d.n() == 1 {
        let t = Thresholds::from_exponents(1, epsilon)?;
        return Ok(SyncOutcome::Synchronized {
            certificate: SyncCertificate::new(CompressedWord::empty(), 0),
            report: StageReport::trivial(d, t),
        });
    }
    let t = Thresholds::compute(d.n(), epsilon)?;
    synchronize_with(d, &t)
}

/// [`synchronize`] with caller-chosen thresholds.
pub fn synchronize_with(d: &Dfa, t: &Thresholds) -> Result<SyncOutcome> {
    let words = build_words(t)?;
    let stages = Stages::analyze(d, t)?;
    let mut report = StageReport::from_stages(d, &stages, &words);
    let w_map = &stages.w_map;
    let b_map = &stages.b_map;

    let mut current = w_map.image();
    report.image_after_w = current.len();

    let b = CompressedWord::letter(LETTER_B);
    let mut parts = vec![words.w.clone()];
    while current.len() > 1 {
        let (p, q) = (current[0], current[1]);
        report.merge_attempts += 1;
        let Some(j) = merge_pair(p, q, w_map, b_map, t.lambda) else {
            report.merge_failures += 1;
            report.failed_pair = Some((p, q));
            return Ok(SyncOutcome::MergeFailed { report });
        };
        report.merge_exponents.push(j);
        match j {
            0 => {}
            1 => parts.push(b.clone()),
            _ => parts.push(CompressedWord::power(b.clone(), j)?),
        }
        parts.push(words.w.clone());
        current = current
            .iter()
            .map(|&s| w_map.apply((0..j).fold(s, |x, _| b_map.apply(x))))
            .collect();
        current.sort_unstable();
        current.dedup();
    }

    let word = if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        CompressedWord::concat(parts)?
    };
    let certificate = SyncCertificate::new(word, current[0]);
    report.word_length = Some(certificate.length);
    if !verify_certificate(d, &certificate) {
        return Err(Error::Internal(format!(
            "certificate of length {} does not verify",
            certificate.length
        )));
    }
    Ok(SyncOutcome::Synchronized {
        certificate,
        report,
    })
}

/// `|w| + (image - 1)(λ + |w|)`, or `None` on overflow.
pub fn assembled_length_bound(w_length: u64, image_size: usize, lambda: u64) -> Option<u64> {
    let pairs = (image_size as u64).saturating_sub(1);
    lambda
        .checked_add(w_length)?
        .checked_mul(pairs)?
        .checked_add(w_length)
}
