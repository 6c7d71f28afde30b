//! Ground-truth algorithms: exact shortest reset words, the pair criterion
//! for synchronizability, and a greedy pairwise-merging baseline.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use crate::automaton::Dfa;
use crate::error::{Error, Result};
use crate::word::CompressedWord;

/// Largest state count accepted by [`shortest_reset_word`].
pub const MAX_EXACT_STATES: usize = 24;

const UNREACHED: u32 = u32::MAX;

/// Letterwise image of subsets given as bitmasks, one lookup per byte.
struct SubsetStepper {
    /// `tables[letter][byte_index * 256 + byte]` is the image mask of those bits.
    tables: Vec<Vec<u32>>,
    bytes: usize,
}

impl SubsetStepper {
    fn new(d: &Dfa) -> Self {
        let bytes = d.n().div_ceil(8);
        let tables = (0..d.k())
            .map(|l| {
                let mut t = vec![0u32; bytes * 256];
                for bi in 0..bytes {
                    for byte in 0..256usize {
                        let mut mask = 0u32;
                        for bit in 0..8 {
                            let q = bi * 8 + bit;
                            if byte >> bit & 1 == 1 && q < d.n() {
                                mask |= 1 << d.step(q, l);
                            }
                        }
                        t[bi * 256 + byte] = mask;
                    }
                }
                t
            })
            .collect();
        Self { tables, bytes }
    }

    fn step(&self, set: u32, letter: usize) -> u32 {
        let t = &self.tables[letter];
        (0..self.bytes).fold(0, |acc, bi| {
            acc | t[bi * 256 + ((set >> (8 * bi)) & 0xff) as usize]
        })
    }
}

/// Shortest word whose action is constant, or `None` if there is none.
///
/// Breadth-first search over the power automaton from the full set, letters
/// tried in order, so the result is the lexicographically least among the
/// shortest reset words.
pub fn shortest_reset_word(d: &Dfa) -> Result<Option<CompressedWord>> {
    let n = d.n();
    if n > MAX_EXACT_STATES {
        return Err(Error::Capacity {
            n,
            limit: MAX_EXACT_STATES,
        });
    }
    let full: u32 = (1u32 << n) - 1;
    if n == 1 {
        return Ok(Some(CompressedWord::empty()));
    }
    let stepper = SubsetStepper::new(d);
    // subset -> (parent subset, letter)
    let mut parent: HashMap<u32, (u32, u8)> = HashMap::new();
    parent.insert(full, (full, u8::MAX));
    let mut queue = VecDeque::from([full]);
    while let Some(set) = queue.pop_front() {
        for letter in 0..d.k() {
            let next = stepper.step(set, letter);
            if let Entry::Vacant(e) = parent.entry(next) {
                e.insert((set, letter as u8));
                if next.count_ones() == 1 {
                    return Ok(Some(rebuild(&parent, next, full)));
                }
                queue.push_back(next);
            }
        }
    }
    Ok(None)
}

fn rebuild(parent: &HashMap<u32, (u32, u8)>, mut set: u32, full: u32) -> CompressedWord {
    let mut letters = Vec::new();
    while set != full {
        let (prev, letter) = parent[&set];
        letters.push(letter as usize);
        set = prev;
    }
    letters.reverse();
    CompressedWord::from_letters(&letters)
}

/// Merge distances of all pairs of states, from a backward search over the
/// pair automaton starting at the diagonal.
#[derive(Debug, Clone)]
pub struct PairTable {
    n: usize,
    dist: Vec<u32>,
    letter: Vec<u32>,
}

impl PairTable {
    pub fn new(d: &Dfa) -> Self {
        let n = d.n();
        let k = d.k();
        // CSR preimage lists per letter
        let mut offsets = vec![vec![0usize; n + 1]; k];
        let mut sources = vec![vec![0usize; n]; k];
        for l in 0..k {
            let off = &mut offsets[l];
            for q in 0..n {
                off[d.step(q, l) + 1] += 1;
            }
            for i in 0..n {
                off[i + 1] += off[i];
            }
            let mut fill = off.clone();
            for q in 0..n {
                let t = d.step(q, l);
                sources[l][fill[t]] = q;
                fill[t] += 1;
            }
        }

        let mut dist = vec![UNREACHED; n * n];
        let mut letter = vec![0u32; n * n];
        let mut queue = VecDeque::with_capacity(n);
        for r in 0..n {
            dist[r * n + r] = 0;
            queue.push_back((r, r));
        }
        while let Some((x, y)) = queue.pop_front() {
            let next = dist[x * n + y] + 1;
            for l in 0..k {
                let px = &sources[l][offsets[l][x]..offsets[l][x + 1]];
                let py = &sources[l][offsets[l][y]..offsets[l][y + 1]];
                for &p in px {
                    for &q in py {
                        if p == q {
                            continue;
                        }
                        let (p, q) = if p < q { (p, q) } else { (q, p) };
                        let idx = p * n + q;
                        if dist[idx] == UNREACHED {
                            dist[idx] = next;
                            letter[idx] = l as u32;
                            queue.push_back((p, q));
                        }
                    }
                }
            }
        }
        Self { n, dist, letter }
    }

    fn index(&self, p: usize, q: usize) -> usize {
        if p <= q {
            p * self.n + q
        } else {
            q * self.n + p
        }
    }

    /// Length of a shortest word merging `p` and `q`.
    pub fn distance(&self, p: usize, q: usize) -> Option<u32> {
        let d = self.dist[self.index(p, q)];
        (d != UNREACHED).then_some(d)
    }

    /// True when every pair merges.
    pub fn all_pairs_merge(&self) -> bool {
        (0..self.n).all(|p| (p + 1..self.n).all(|q| self.dist[p * self.n + q] != UNREACHED))
    }

    /// A shortest word merging `p` and `q`.
    pub fn merging_word(&self, d: &Dfa, mut p: usize, mut q: usize) -> Option<Vec<usize>> {
        self.distance(p, q)?;
        let mut word = Vec::new();
        while p != q {
            let l = self.letter[self.index(p, q)] as usize;
            word.push(l);
            p = d.step(p, l);
            q = d.step(q, l);
        }
        Some(word)
    }
}

/// True iff every pair of states can be merged by some word.
pub fn is_synchronizing(d: &Dfa) -> bool {
    d.n() == 1 || PairTable::new(d).all_pairs_merge()
}

/// Above this many live states, the greedy step only looks at pairs that
/// contain the smallest live state.
const GREEDY_FULL_SCAN: usize = 512;

/// Repeatedly merges the closest pair of the current set with a shortest
/// merging word. `None` when some pair cannot be merged.
pub fn greedy_reset_word(d: &Dfa) -> Option<CompressedWord> {
    let n = d.n();
    if n == 1 {
        return Some(CompressedWord::empty());
    }
    let table = PairTable::new(d);
    if !table.all_pairs_merge() {
        return None;
    }
    let mut current: Vec<usize> = (0..n).collect();
    let mut letters = Vec::new();
    while current.len() > 1 {
        let m = current.len();
        let mut best = (u32::MAX, current[0], current[1]);
        let firsts = if m <= GREEDY_FULL_SCAN { m } else { 1 };
        for i in 0..firsts {
            for j in i + 1..m {
                let dist = table.distance(current[i], current[j])?;
                if dist < best.0 {
                    best = (dist, current[i], current[j]);
                }
            }
        }
        let word = table.merging_word(d, best.1, best.2)?;
        for s in current.iter_mut() {
            *s = d.run(*s, word.iter().copied());
        }
        current.sort_unstable();
        current.dedup();
        letters.extend(word);
    }
    Some(CompressedWord::from_letters(&letters))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{verify_certificate, SyncCertificate};
    use crate::mapping::StateMapping;
    use crate::randgen::{cerny, uniform_dfa, Rng};
    use crate::word::{eval_word, format_word};

    fn dfa(a: Vec<usize>, b: Vec<usize>) -> Dfa {
        Dfa::from_letter_actions(&[StateMapping::new(a).unwrap(), StateMapping::new(b).unwrap()])
            .unwrap()
    }

    fn all_dfas(n: usize) -> impl Iterator<Item = Dfa> {
        let cells = 2 * n;
        let total = n.pow(cells as u32);
        (0..total).map(move |mut code| {
            let delta = (0..cells)
                .map(|_| {
                    let t = code % n;
                    code /= n;
                    t
                })
                .collect();
            Dfa::new(n, 2, delta).unwrap()
        })
    }

    fn synchronizes(d: &Dfa, letters: &[usize]) -> bool {
        let first = d.run(0, letters.iter().copied());
        (1..d.n()).all(|q| d.run(q, letters.iter().copied()) == first)
    }

    #[test]
    fn constant_letter() {
        let d = dfa(vec![0, 0, 0], vec![0, 1, 2]);
        let w = shortest_reset_word(&d).unwrap().unwrap();
        assert_eq!(format_word(&w).unwrap(), "a");
        assert!(is_synchronizing(&d));
        assert_eq!(format_word(&greedy_reset_word(&d).unwrap()).unwrap(), "a");
    }

    #[test]
    fn permutations_never_synchronize() {
        let d = dfa(vec![1, 2, 0], vec![0, 2, 1]);
        assert_eq!(shortest_reset_word(&d).unwrap(), None);
        assert!(!is_synchronizing(&d));
        assert!(greedy_reset_word(&d).is_none());
    }

    #[test]
    fn single_state() {
        let d = Dfa::new(1, 2, vec![0, 0]).unwrap();
        assert!(shortest_reset_word(&d).unwrap().unwrap().is_empty());
        assert!(is_synchronizing(&d));
        assert!(greedy_reset_word(&d).unwrap().is_empty());
    }

    #[test]
    fn capacity_limit() {
        let d = uniform_dfa(25, 2, &mut Rng::from_seed(0)).unwrap();
        assert_eq!(
            shortest_reset_word(&d),
            Err(Error::Capacity { n: 25, limit: 24 })
        );
    }

    #[test]
    fn cerny_lengths() {
        for (n, len) in [(4, 9), (5, 16), (6, 25)] {
            let d = cerny(n).unwrap();
            let w = shortest_reset_word(&d).unwrap().unwrap();
            assert_eq!(w.len(), len);
            assert!(synchronizes(&d, &w.to_letter_vec()));
        }
    }

    #[test]
    fn cerny_greedy() {
        let d = cerny(4).unwrap();
        let w = greedy_reset_word(&d).unwrap();
        assert!(w.len() >= 9);
        let sink = eval_word(&d, &w).unwrap().constant_value().unwrap();
        assert!(verify_certificate(&d, &SyncCertificate::new(w, sink)));
    }

    #[test]
    fn exhaustive_three_states() {
        let mut count = 0;
        let mut max_len = 0;
        for d in all_dfas(3) {
            count += 1;
            let exact = shortest_reset_word(&d).unwrap();
            assert_eq!(is_synchronizing(&d), exact.is_some(), "{d:?}");
            if let Some(w) = exact {
                max_len = max_len.max(w.len());
            }
        }
        assert_eq!(count, 729);
        assert_eq!(max_len, 4);
    }

    /// Enumerates all words up to a given length in length-lex order.
    fn brute_force_shortest(d: &Dfa, max_len: usize) -> Option<Vec<usize>> {
        for len in 0..=max_len {
            for code in 0..(1usize << len) {
                let letters: Vec<usize> = (0..len).rev().map(|i| code >> i & 1).collect();
                if synchronizes(d, &letters) {
                    return Some(letters);
                }
            }
        }
        None
    }

    #[test]
    fn bfs_matches_enumeration() {
        for n in 2..=3 {
            for d in all_dfas(n) {
                let exact = shortest_reset_word(&d).unwrap().map(|w| w.to_letter_vec());
                match brute_force_shortest(&d, 6) {
                    Some(letters) => assert_eq!(exact, Some(letters), "{d:?}"),
                    None => assert!(exact.is_none_or(|w| w.len() > 6), "{d:?}"),
                }
            }
        }
    }

    #[test]
    fn random_small_bounds() {
        for i in 0..1000u64 {
            let n = 2 + (i % 9) as usize;
            let d = uniform_dfa(n, 2, &mut Rng::substream(17, i)).unwrap();
            let exact = shortest_reset_word(&d).unwrap();
            assert_eq!(exact.is_some(), is_synchronizing(&d));
            if let Some(w) = exact {
                let len = w.len() as usize;
                assert!(len <= (n - 1) * (n - 1));
                assert!(len <= (n * n * n - n) / 6);
                let greedy = greedy_reset_word(&d).unwrap();
                assert!(greedy.len() >= w.len());
                assert!(synchronizes(&d, &greedy.to_letter_vec()));
            } else {
                assert!(greedy_reset_word(&d).is_none());
            }
        }
    }

    #[test]
    fn pair_table_words() {
        let d = uniform_dfa(40, 2, &mut Rng::from_seed(3)).unwrap();
        let t = PairTable::new(&d);
        for p in 0..40 {
            for q in 0..40 {
                match t.merging_word(&d, p, q) {
                    Some(w) => {
                        assert_eq!(w.len() as u32, t.distance(p, q).unwrap());
                        assert_eq!(d.run(p, w.iter().copied()), d.run(q, w.iter().copied()));
                    }
                    None => assert!(t.distance(p, q).is_none()),
                }
            }
        }
    }

    #[test]
    fn three_letter_alphabet() {
        // only the third letter merges anything
        let d = Dfa::new(3, 3, vec![1, 0, 0, 2, 1, 0, 0, 2, 0]).unwrap();
        let w = shortest_reset_word(&d).unwrap().unwrap();
        assert_eq!(w.to_letter_vec(), vec![2]);
        assert!(is_synchronizing(&d));
        assert!(greedy_reset_word(&d).is_some());
    }
}
