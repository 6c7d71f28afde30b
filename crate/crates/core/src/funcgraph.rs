//! Functional-graph structure of a mapping: cyclic points, heights, cycles.
//!
//! A mapping `f` on a finite set is a forest of in-trees hanging off disjoint
//! cycles. A point is cyclic when some iterate of `f` brings it back to
//! itself; the height of a point is the number of steps needed to reach a
//! cyclic point, and the height of `f` is the largest such height.

use crate::error::{argument, Error, Result};
use crate::mapping::StateMapping;

const WHITE: u8 = 0;
const GRAY: u8 = 1;
const BLACK: u8 = 2;

/// Exact cycle decomposition of a mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    height: Vec<usize>,
    /// The first cyclic point reached from each state.
    root: Vec<usize>,
    /// Position inside its cycle, for cyclic points; `usize::MAX` otherwise.
    position: Vec<usize>,
    /// Cycle index of each state's root.
    cycle_of: Vec<usize>,
    /// `cycles[c][i + 1] = f(cycles[c][i])`, wrapping around.
    cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    pub fn len(&self) -> usize {
        self.height.len()
    }

    pub fn is_empty(&self) -> bool {
        self.height.is_empty()
    }

    pub fn is_cyclic(&self, q: usize) -> bool {
        self.height[q] == 0
    }

    pub fn height_of(&self, q: usize) -> usize {
        self.height[q]
    }

    pub fn heights(&self) -> &[usize] {
        &self.height
    }

    /// Cyclic point reached after `height_of(q)` steps.
    pub fn root(&self, q: usize) -> usize {
        self.root[q]
    }

    /// Identifier of the cycle that `q` drains into.
    pub fn cycle_id(&self, q: usize) -> usize {
        self.cycle_of[q]
    }

    /// Position of a cyclic point within its cycle.
    pub fn cycle_position(&self, q: usize) -> Option<usize> {
        self.is_cyclic(q).then(|| self.position[q])
    }

    /// Length of the cycle `q` drains into.
    pub fn cycle_length(&self, q: usize) -> usize {
        self.cycles[self.cycle_of[q]].len()
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn cyclic_points(&self) -> Vec<usize> {
        (0..self.len()).filter(|&q| self.is_cyclic(q)).collect()
    }

    pub fn cyclic_count(&self) -> usize {
        self.cycles.iter().map(Vec::len).sum()
    }

    /// Height of the mapping.
    pub fn height(&self) -> usize {
        self.height.iter().copied().max().unwrap_or(0)
    }
}

/// Decomposes `f` in `O(n)` time with an iterative three-color walk.
pub fn decompose(f: &StateMapping) -> CycleDecomposition {
    let targets = f.targets();
    let n = targets.len();
    let mut color = vec![WHITE; n];
    let mut height = vec![0; n];
    let mut root = vec![0; n];
    let mut position = vec![usize::MAX; n];
    let mut cycle_of = vec![0; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    let mut path_index = vec![0usize; n];

    for start in 0..n {
        if color[start] != WHITE {
            continue;
        }
        path.clear();
        let mut x = start;
        while color[x] == WHITE {
            color[x] = GRAY;
            path_index[x] = path.len();
            path.push(x);
            x = targets[x];
        }
        // `tail` is the length of the acyclic prefix of `path`.
        let tail = if color[x] == GRAY {
            let first = path_index[x];
            let id = cycles.len();
            let cycle = path[first..].to_vec();
            for (i, &c) in cycle.iter().enumerate() {
                height[c] = 0;
                root[c] = c;
                position[c] = i;
                cycle_of[c] = id;
            }
            cycles.push(cycle);
            first
        } else {
            path.len()
        };
        for &p in path[..tail].iter().rev() {
            let next = targets[p];
            height[p] = height[next] + 1;
            root[p] = root[next];
            cycle_of[p] = cycle_of[next];
        }
        for &p in &path {
            color[p] = BLACK;
        }
    }

    CycleDecomposition {
        height,
        root,
        position,
        cycle_of,
        cycles,
    }
}

/// Sorted cyclic points of `f`.
pub fn cyclic_points(f: &StateMapping) -> Vec<usize> {
    decompose(f).cyclic_points()
}

/// Largest height of a point of `f`.
pub fn height(f: &StateMapping) -> usize {
    decompose(f).height()
}

/// Answers `f^t` for arbitrary `t` in `O(n)` per query.
///
/// States are listed in preorder of the in-forest rooted at cyclic points, so
/// while scanning that order the most recent state seen at each depth is an
/// ancestor (a forward iterate) of the current one.
#[derive(Debug, Clone)]
pub struct PowerTable {
    decomposition: CycleDecomposition,
    preorder: Vec<usize>,
}

impl PowerTable {
    pub fn new(f: &StateMapping) -> Self {
        let decomposition = decompose(f);
        let n = f.len();
        let targets = f.targets();

        // CSR lists of non-cyclic preimages.
        let mut offsets = vec![0usize; n + 1];
        for q in 0..n {
            if !decomposition.is_cyclic(q) {
                offsets[targets[q] + 1] += 1;
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut children = vec![0usize; offsets[n]];
        for (q, &p) in targets.iter().enumerate() {
            if !decomposition.is_cyclic(q) {
                children[fill[p]] = q;
                fill[p] += 1;
            }
        }

        let mut preorder = Vec::with_capacity(n);
        let mut stack = Vec::new();
        for cycle in decomposition.cycles() {
            for &r in cycle {
                stack.push(r);
                while let Some(v) = stack.pop() {
                    preorder.push(v);
                    stack.extend_from_slice(&children[offsets[v]..offsets[v + 1]]);
                }
            }
        }
        debug_assert_eq!(preorder.len(), n);

        Self {
            decomposition,
            preorder,
        }
    }

    pub fn decomposition(&self) -> &CycleDecomposition {
        &self.decomposition
    }

    /// `f` iterated `t` times.
    pub fn power(&self, t: u64) -> StateMapping {
        let d = &self.decomposition;
        let n = d.len();
        let mut out = vec![0usize; n];
        let mut ancestors = vec![0usize; d.height() + 1];
        for &v in &self.preorder {
            let h = d.height[v];
            ancestors[h] = v;
            // `t < h` also means `t` fits in usize.
            out[v] = if (t as u128) < h as u128 {
                ancestors[h - t as usize]
            } else {
                let r = d.root[v];
                let cycle = &d.cycles[d.cycle_of[v]];
                let len = cycle.len() as u64;
                let shift = (t - h as u64) % len;
                cycle[((d.position[r] as u64 + shift) % len) as usize]
            };
        }
        StateMapping::from_targets_unchecked(out)
    }
}

/// A mapping restricted to a subset of states that it keeps closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubMapping {
    domain: Vec<usize>,
    targets: Vec<usize>,
    compact: StateMapping,
}

impl SubMapping {
    /// `domain` must be strictly increasing and every target must lie in it.
    pub fn new(domain: Vec<usize>, targets: Vec<usize>) -> Result<Self> {
        if domain.len() != targets.len() {
            return Err(argument("domain and targets differ in length"));
        }
        if domain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(argument("domain must be strictly increasing"));
        }
        let compact = targets
            .iter()
            .zip(&domain)
            .map(|(&t, &s)| {
                domain.binary_search(&t).map_err(|_| Error::Domain {
                    state: s,
                    target: t,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            domain,
            targets,
            compact: StateMapping::from_targets_unchecked(compact),
        })
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// The same mapping relabelled onto `0..len()`.
    pub fn compact(&self) -> &StateMapping {
        &self.compact
    }

    pub fn apply(&self, state: usize) -> Option<usize> {
        self.domain
            .binary_search(&state)
            .ok()
            .map(|i| self.targets[i])
    }

    /// Decomposition of the compact form; indices refer to `domain()` positions.
    pub fn decompose(&self) -> CycleDecomposition {
        decompose(&self.compact)
    }

    /// Sorted cyclic points, in original state labels.
    pub fn cyclic_points(&self) -> Vec<usize> {
        self.decompose()
            .cyclic_points()
            .into_iter()
            .map(|i| self.domain[i])
            .collect()
    }

    pub fn height(&self) -> usize {
        self.decompose().height()
    }
}

/// Restricts `f` to a sorted `domain` closed under `f`.
pub fn sub_restrict(f: &StateMapping, domain: &[usize]) -> Result<SubMapping> {
    if let Some(&q) = domain.iter().find(|&&q| q >= f.len()) {
        return Err(argument(format!("state {q} outside 0..{}", f.len())));
    }
    let targets = domain.iter().map(|&q| f.apply(q)).collect();
    SubMapping::new(domain.to_vec(), targets)
}
