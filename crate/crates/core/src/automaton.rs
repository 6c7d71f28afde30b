//! Complete and partial deterministic automata.
//!
//! States are `0..n` and letters are `0..k`; letter 0 is written `a` and
//! letter 1 is written `b`. Transition tables are stored row-major, one row
//! per state.

use crate::error::{argument, Result};
use crate::mapping::StateMapping;

/// Index of the letter `a`.
pub const LETTER_A: usize = 0;
/// Index of the letter `b`.
pub const LETTER_B: usize = 1;

/// A complete deterministic automaton without initial or final states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    n: usize,
    k: usize,
    delta: Vec<usize>,
}

impl Dfa {
    /// Builds an automaton from a row-major `n * k` table.
    pub fn new(n: usize, k: usize, delta: Vec<usize>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(argument(format!(
                "automaton needs n >= 1 and k >= 1 (got n = {n}, k = {k})"
            )));
        }
        let cells = n
            .checked_mul(k)
            .ok_or_else(|| argument("transition table size overflows"))?;
        if delta.len() != cells {
            return Err(argument(format!(
                "transition table has {} entries, expected {cells}",
                delta.len()
            )));
        }
        if let Some((i, &t)) = delta.iter().enumerate().find(|(_, &t)| t >= n) {
            return Err(argument(format!(
                "transition ({}, {}) targets {t}, outside 0..{n}",
                i / k,
                i % k
            )));
        }
        Ok(Self { n, k, delta })
    }

    /// Builds an automaton from one action per letter.
    pub fn from_letter_actions(actions: &[StateMapping]) -> Result<Self> {
        let first = actions
            .first()
            .ok_or_else(|| argument("at least one letter action is required"))?;
        let n = first.len();
        if actions.iter().any(|m| m.len() != n) {
            return Err(argument("letter actions have different sizes"));
        }
        let k = actions.len();
        let mut delta = vec![0; n * k];
        for (letter, action) in actions.iter().enumerate() {
            for (q, &t) in action.targets().iter().enumerate() {
                delta[q * k + letter] = t;
            }
        }
        Self::new(n, k, delta)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Row-major transition table.
    pub fn table(&self) -> &[usize] {
        &self.delta
    }

    #[inline]
    pub fn step(&self, state: usize, letter: usize) -> usize {
        self.delta[state * self.k + letter]
    }

    /// The action of a single letter as a total mapping.
    pub fn letter_action(&self, letter: usize) -> Result<StateMapping> {
        if letter >= self.k {
            return Err(argument(format!(
                "letter {letter} outside alphabet of size {}",
                self.k
            )));
        }
        let targets = (0..self.n).map(|q| self.step(q, letter)).collect();
        Ok(StateMapping::from_targets_unchecked(targets))
    }

    /// Applies a sequence of letters one at a time.
    pub fn run(&self, state: usize, letters: impl IntoIterator<Item = usize>) -> usize {
        letters.into_iter().fold(state, |q, l| self.step(q, l))
    }
}

/// An automaton whose transitions may be undefined.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialDfa {
    n: usize,
    k: usize,
    delta: Vec<Option<usize>>,
}

impl PartialDfa {
    pub fn new(n: usize, k: usize, delta: Vec<Option<usize>>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(argument(format!(
                "automaton needs n >= 1 and k >= 1 (got n = {n}, k = {k})"
            )));
        }
        if delta.len() != n * k {
            return Err(argument(format!(
                "transition table has {} entries, expected {}",
                delta.len(),
                n * k
            )));
        }
        if delta.iter().flatten().any(|&t| t >= n) {
            return Err(argument(format!("a defined transition leaves 0..{n}")));
        }
        Ok(Self { n, k, delta })
    }

    /// An automaton with no transitions at all.
    pub fn empty(n: usize, k: usize) -> Result<Self> {
        Self::new(n, k, vec![None; n * k])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn table(&self) -> &[Option<usize>] {
        &self.delta
    }

    pub fn get(&self, state: usize, letter: usize) -> Option<usize> {
        self.delta[state * self.k + letter]
    }

    pub fn set(&mut self, state: usize, letter: usize, target: Option<usize>) -> Result<()> {
        if state >= self.n || letter >= self.k || target.is_some_and(|t| t >= self.n) {
            return Err(argument("transition out of range"));
        }
        self.delta[state * self.k + letter] = target;
        Ok(())
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().all(Option::is_some)
    }

    /// The action of `letter`, if it is defined on every state.
    pub fn letter_action(&self, letter: usize) -> Result<StateMapping> {
        if letter >= self.k {
            return Err(argument(format!(
                "letter {letter} outside alphabet of size {}",
                self.k
            )));
        }
        let targets = (0..self.n)
            .map(|q| {
                self.get(q, letter)
                    .ok_or_else(|| argument(format!("transition ({q}, {letter}) is undefined")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StateMapping::from_targets_unchecked(targets))
    }

    /// The complete automaton, when every transition is defined.
    pub fn to_complete(&self) -> Option<Dfa> {
        let delta = self.delta.iter().copied().collect::<Option<Vec<_>>>()?;
        Some(Dfa {
            n: self.n,
            k: self.k,
            delta,
        })
    }
}

impl From<&Dfa> for PartialDfa {
    fn from(d: &Dfa) -> Self {
        Self {
            n: d.n,
            k: d.k,
            delta: d.delta.iter().map(|&t| Some(t)).collect(),
        }
    }
}
