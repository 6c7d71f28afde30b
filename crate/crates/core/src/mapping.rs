//! Total maps on `0..n`, used as the action of a word.

use crate::error::{argument, Result};
use crate::funcgraph::PowerTable;

/// A total function from `0..n` to itself.
///
/// Composition reads left to right: `f.then(&g)` first applies `f`, then
/// `g`, so the action of `uv` is `action(u).then(&action(v))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateMapping {
    targets: Vec<usize>,
}

impl StateMapping {
    pub fn new(targets: Vec<usize>) -> Result<Self> {
        let n = targets.len();
        if let Some((q, &t)) = targets.iter().enumerate().find(|(_, &t)| t >= n) {
            return Err(argument(format!("state {q} maps to {t}, outside 0..{n}")));
        }
        Ok(Self { targets })
    }

    pub(crate) fn from_targets_unchecked(targets: Vec<usize>) -> Self {
        debug_assert!(targets.iter().all(|&t| t < targets.len()));
        Self { targets }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            targets: (0..n).collect(),
        }
    }

    pub fn constant(n: usize, value: usize) -> Result<Self> {
        if value >= n {
            return Err(argument(format!("constant {value} outside 0..{n}")));
        }
        Ok(Self {
            targets: vec![value; n],
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn into_targets(self) -> Vec<usize> {
        self.targets
    }

    #[inline]
    pub fn apply(&self, state: usize) -> usize {
        self.targets[state]
    }

    /// `x -> g(f(x))`.
    pub fn then(&self, g: &StateMapping) -> Result<StateMapping> {
        compose(self, g)
    }

    /// `f` iterated `t` times, in `O(n)` regardless of `t`.
    pub fn power(&self, t: u64) -> StateMapping {
        mapping_power(self, t)
    }

    /// Sorted distinct values.
    pub fn image(&self) -> Vec<usize> {
        image(self)
    }

    /// The single value of a constant mapping.
    pub fn constant_value(&self) -> Option<usize> {
        let (&first, rest) = self.targets.split_first()?;
        rest.iter().all(|&t| t == first).then_some(first)
    }

    /// Sorted image of a set of states.
    pub fn image_of(&self, states: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = states.iter().map(|&s| self.targets[s]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Applies `f`, then `g`.
pub fn compose(f: &StateMapping, g: &StateMapping) -> Result<StateMapping> {
    if f.len() != g.len() {
        return Err(argument(format!(
            "cannot compose mappings of sizes {} and {}",
            f.len(),
            g.len()
        )));
    }
    let targets = f.targets.iter().map(|&x| g.targets[x]).collect();
    Ok(StateMapping { targets })
}

/// `f` composed with itself `t` times; `t = 0` gives the identity.
pub fn mapping_power(f: &StateMapping, t: u64) -> StateMapping {
    match t {
        0 => StateMapping::identity(f.len()),
        1 => f.clone(),
        _ => PowerTable::new(f).power(t),
    }
}

/// Sorted distinct values of `f`.
pub fn image(f: &StateMapping) -> Vec<usize> {
    let mut hit = vec![false; f.len()];
    for &t in &f.targets {
        hit[t] = true;
    }
    hit.iter()
        .enumerate()
        .filter_map(|(q, &h)| h.then_some(q))
        .collect()
}
