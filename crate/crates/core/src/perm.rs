//! Permutations with a cached inverse, plus the three distance functionals
//! the walks are measured in: inversions (adjacent-transposition distance),
//! n minus cycle count (transposition distance), and the descent-based
//! riffle-shuffle distance.

use crate::error::{Error, Result};
use crate::stats::RngStream;

/// A bijection on `{0, .., n-1}` stored both ways: `forward[i]` is the label
/// at position `i` and `inverse[forward[i]] == i` always holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl Permutation {
    /// The identity on `{0, .., n-1}`; `n` must be positive.
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("permutation size must be at least 1"));
        }
        if n > u32::MAX as usize {
            return Err(Error::invalid("permutation size exceeds u32 range"));
        }
        let forward: Vec<u32> = (0..n as u32).collect();
        Ok(Permutation {
            inverse: forward.clone(),
            forward,
        })
    }

    /// Builds from an explicit forward array, validating bijectivity.
    pub fn from_forward(forward: Vec<u32>) -> Result<Self> {
        let n = forward.len();
        if n == 0 {
            return Err(Error::invalid("permutation size must be at least 1"));
        }
        let mut inverse = vec![u32::MAX; n];
        for (i, &v) in forward.iter().enumerate() {
            if (v as usize) >= n {
                return Err(Error::invalid(format!("label {v} out of range for n={n}")));
            }
            if inverse[v as usize] != u32::MAX {
                return Err(Error::invalid(format!("label {v} repeated")));
            }
            inverse[v as usize] = i as u32;
        }
        Ok(Permutation { forward, inverse })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    pub fn forward(&self) -> &[u32] {
        &self.forward
    }

    pub fn inverse(&self) -> &[u32] {
        &self.inverse
    }

    /// Exchanges the values at positions `i` and `i+1`.
    pub fn apply_adjacent_swap(&mut self, i: usize) -> Result<()> {
        if i + 1 >= self.forward.len() {
            return Err(Error::invalid(format!(
                "adjacent swap position {i} out of range for n={}",
                self.forward.len()
            )));
        }
        self.swap_positions(i, i + 1);
        Ok(())
    }

    /// Exchanges the values at positions `a` and `b` (`a != b`).
    pub fn apply_transposition(&mut self, a: usize, b: usize) -> Result<()> {
        let n = self.forward.len();
        if a == b {
            return Err(Error::invalid("transposition endpoints must differ"));
        }
        if a >= n || b >= n {
            return Err(Error::invalid(format!(
                "transposition ({a},{b}) out of range for n={n}"
            )));
        }
        self.swap_positions(a, b);
        Ok(())
    }

    #[inline]
    fn swap_positions(&mut self, a: usize, b: usize) {
        self.forward.swap(a, b);
        self.inverse[self.forward[a] as usize] = a as u32;
        self.inverse[self.forward[b] as usize] = b as u32;
    }

    /// Number of pairs `i < j` with `forward[i] > forward[j]`, counted in
    /// `O(n log n)` with a binary indexed tree.
    pub fn inversion_count(&self) -> u64 {
        let n = self.forward.len();
        let mut tree = Fenwick::new(n);
        let mut inversions = 0u64;
        for (seen, &v) in self.forward.iter().enumerate() {
            // values greater than v among the `seen` already inserted
            inversions += seen as u64 - tree.prefix_sum(v as usize);
            tree.add(v as usize, 1);
        }
        inversions
    }

    /// Quadratic double-loop inversion count; the oracle for `inversion_count`.
    pub fn inversion_count_naive(&self) -> u64 {
        let f = &self.forward;
        let mut inversions = 0u64;
        for i in 0..f.len() {
            for j in i + 1..f.len() {
                if f[i] > f[j] {
                    inversions += 1;
                }
            }
        }
        inversions
    }

    /// Number of cycles of the bijection.
    pub fn cycle_count(&self) -> usize {
        let n = self.forward.len();
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.forward[j] as usize;
            }
        }
        cycles
    }

    /// Minimal number of transpositions expressing the permutation,
    /// `n - cycle_count`.
    pub fn transposition_distance(&self) -> usize {
        self.forward.len() - self.cycle_count()
    }

    /// Whether `a` and `b` lie on the same cycle, walking the cycle from `a`.
    /// Cost is bounded by the cycle length of `a`.
    pub fn in_same_cycle(&self, a: usize, b: usize) -> bool {
        if a == b {
            return true;
        }
        let mut j = self.forward[a] as usize;
        while j != a {
            if j == b {
                return true;
            }
            j = self.forward[j] as usize;
        }
        false
    }

    /// Number of positions `i` with `forward[i] > forward[i+1]`.
    pub fn descent_count(&self) -> u64 {
        self.forward.windows(2).filter(|w| w[0] > w[1]).count() as u64
    }

    /// Riffle-shuffle distance `ceil(log2(descents + 1))`.
    pub fn riffle_distance(&self) -> u32 {
        ceil_log2(self.descent_count() + 1)
    }

    /// Verifies `inverse[forward[i]] == i` for every position.
    pub fn is_consistent(&self) -> bool {
        self.forward
            .iter()
            .enumerate()
            .all(|(i, &v)| self.inverse[v as usize] == i as u32)
    }

    /// Replaces the contents with a uniformly random permutation
    /// (Fisher-Yates driven by the given stream).
    pub fn randomize(&mut self, rng: &mut RngStream) {
        let n = self.forward.len();
        for i in (1..n).rev() {
            let j = rng.uniform_below(i as u64 + 1) as usize;
            self.forward.swap(i, j);
        }
        for (i, &v) in self.forward.iter().enumerate() {
            self.inverse[v as usize] = i as u32;
        }
    }
}

/// `ceil(log2(x))` for `x >= 1`.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1);
    if x == 1 {
        0
    } else {
        u64::BITS - (x - 1).leading_zeros()
    }
}

struct Fenwick {
    data: Vec<u32>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick {
            data: vec![0; n + 1],
        }
    }

    /// Count of inserted values `<= v`.
    fn prefix_sum(&self, v: usize) -> u64 {
        let mut i = v + 1;
        let mut s = 0u64;
        while i > 0 {
            s += u64::from(self.data[i]);
            i -= i & i.wrapping_neg();
        }
        s
    }

    fn add(&mut self, v: usize, amount: u32) {
        let mut i = v + 1;
        while i < self.data.len() {
            self.data[i] += amount;
            i += i & i.wrapping_neg();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::derive_stream;
    use proptest::prelude::*;

    fn random_permutation(n: usize, rng: &mut RngStream) -> Permutation {
        let mut p = Permutation::identity(n).unwrap();
        p.randomize(rng);
        p
    }

    #[test]
    fn identity_basics() {
        let p = Permutation::identity(3).unwrap();
        assert_eq!(p.forward(), &[0, 1, 2]);
        assert_eq!(Permutation::identity(10).unwrap().inversion_count(), 0);
        assert_eq!(Permutation::identity(5).unwrap().cycle_count(), 5);
        assert!(Permutation::identity(0).is_err());
    }

    #[test]
    fn adjacent_swap_examples() {
        let mut p = Permutation::identity(3).unwrap();
        p.apply_adjacent_swap(0).unwrap();
        assert_eq!(p.forward(), &[1, 0, 2]);
        p.apply_adjacent_swap(0).unwrap();
        assert_eq!(p.forward(), &[0, 1, 2]);
        assert!(p.apply_adjacent_swap(2).is_err());
    }

    #[test]
    fn adjacent_swap_changes_inversions_by_one() {
        let mut rng = derive_stream(1, 0);
        for _ in 0..50 {
            let mut p = random_permutation(20, &mut rng);
            let before = p.inversion_count_naive();
            let i = rng.uniform_below(19) as usize;
            p.apply_adjacent_swap(i).unwrap();
            let after = p.inversion_count_naive();
            assert_eq!(before.abs_diff(after), 1);
        }
    }

    #[test]
    fn transposition_examples() {
        let mut p = Permutation::identity(4).unwrap();
        p.apply_transposition(0, 1).unwrap();
        assert_eq!(p.transposition_distance(), 1);
        p.apply_transposition(0, 1).unwrap();
        assert_eq!(p.transposition_distance(), 0);
        assert!(p.apply_transposition(2, 2).is_err());
        assert!(p.apply_transposition(0, 9).is_err());
    }

    /// Brute-force cycle decomposition by full traversal, as the oracle for
    /// the one-endpoint cycle walk and the +-1 cycle-count law.
    fn cycle_id_of(p: &Permutation) -> Vec<usize> {
        let n = p.len();
        let mut id = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if id[s] != usize::MAX {
                continue;
            }
            let mut j = s;
            while id[j] == usize::MAX {
                id[j] = next;
                j = p.forward()[j] as usize;
            }
            next += 1;
        }
        id
    }

    #[test]
    fn transposition_cycle_increment_law() {
        let mut rng = derive_stream(2, 0);
        for _ in 0..200 {
            let mut p = random_permutation(12, &mut rng);
            let ids = cycle_id_of(&p);
            let a = rng.uniform_below(12) as usize;
            let mut b = rng.uniform_below(11) as usize;
            if b >= a {
                b += 1;
            }
            let same = ids[a] == ids[b];
            assert_eq!(p.in_same_cycle(a, b), same);
            let before = p.cycle_count();
            p.apply_transposition(a, b).unwrap();
            let after = p.cycle_count();
            if same {
                assert_eq!(after, before + 1);
            } else {
                assert_eq!(after + 1, before);
            }
        }
    }

    #[test]
    fn inversion_examples() {
        let p = Permutation::from_forward(vec![1, 0, 2]).unwrap();
        assert_eq!(p.inversion_count(), 1);
        let p = Permutation::from_forward(vec![5, 4, 3, 2, 1, 0]).unwrap();
        assert_eq!(p.inversion_count(), 15);
        let p = Permutation::from_forward(vec![2, 0, 1]).unwrap();
        assert_eq!(p.inversion_count_naive(), 2);
        assert_eq!(Permutation::identity(8).unwrap().inversion_count_naive(), 0);
    }

    #[test]
    fn inversion_fast_matches_naive_random() {
        let mut rng = derive_stream(3, 0);
        for _ in 0..1000 {
            let n = 2 + rng.uniform_below(63) as usize;
            let p = random_permutation(n, &mut rng);
            assert_eq!(p.inversion_count(), p.inversion_count_naive());
        }
    }

    /// Enumerates all permutations of `{0..n-1}` (Heap's algorithm).
    pub(crate) fn all_permutations(n: usize) -> Vec<Vec<u32>> {
        let mut items: Vec<u32> = (0..n as u32).collect();
        let mut out = Vec::new();
        fn rec(k: usize, items: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if k <= 1 {
                out.push(items.clone());
                return;
            }
            for i in 0..k {
                rec(k - 1, items, out);
                if k % 2 == 0 {
                    items.swap(i, k - 1);
                } else {
                    items.swap(0, k - 1);
                }
            }
        }
        rec(n, &mut items, &mut out);
        out
    }

    #[test]
    fn inversion_fast_matches_naive_exhaustive_small() {
        for n in 1..=8 {
            for f in all_permutations(n) {
                let p = Permutation::from_forward(f).unwrap();
                assert_eq!(p.inversion_count(), p.inversion_count_naive());
            }
        }
    }

    #[test]
    fn three_cycle_distance() {
        let p = Permutation::from_forward(vec![1, 2, 0]).unwrap();
        assert_eq!(p.cycle_count(), 1);
        assert_eq!(p.transposition_distance(), 2);
        assert_eq!(Permutation::identity(7).unwrap().transposition_distance(), 0);
    }

    /// BFS over the Cayley graph of S_n generated by all transpositions.
    fn cayley_distances(n: usize) -> std::collections::HashMap<Vec<u32>, usize> {
        use std::collections::{HashMap, VecDeque};
        let identity: Vec<u32> = (0..n as u32).collect();
        let mut dist = HashMap::new();
        dist.insert(identity.clone(), 0);
        let mut queue = VecDeque::from([identity]);
        while let Some(cur) = queue.pop_front() {
            let d = dist[&cur];
            for a in 0..n {
                for b in a + 1..n {
                    let mut next = cur.clone();
                    next.swap(a, b);
                    if !dist.contains_key(&next) {
                        dist.insert(next.clone(), d + 1);
                        queue.push_back(next);
                    }
                }
            }
        }
        dist
    }

    #[test]
    fn transposition_distance_matches_cayley_bfs() {
        for n in 2..=6 {
            for (f, d) in cayley_distances(n) {
                let p = Permutation::from_forward(f).unwrap();
                assert_eq!(p.transposition_distance(), d);
            }
        }
    }

    #[test]
    fn descent_and_riffle_distance() {
        let id = Permutation::identity(9).unwrap();
        assert_eq!(id.descent_count(), 0);
        assert_eq!(id.riffle_distance(), 0);
        let rev = Permutation::from_forward(vec![4, 3, 2, 1, 0]).unwrap();
        assert_eq!(rev.descent_count(), 4);
        // Des=1 -> 1, Des=2 -> 2, Des=3 -> 2 under ceil(log2(Des+1)).
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
    }

    #[test]
    fn expected_inversions_of_uniform_permutation() {
        let mut rng = derive_stream(5, 0);
        let n = 100usize;
        let reps = 2000;
        let samples: Vec<f64> = (0..reps)
            .map(|_| {
                let p = random_permutation(n, &mut rng);
                p.inversion_count() as f64
            })
            .collect();
        let target = (n * (n - 1)) as f64 / 4.0;
        let s = crate::stats::summarize(&samples, Some(target)).unwrap();
        assert!(
            s.z_score.unwrap().abs() < 4.0,
            "mean {} target {target} z {}",
            s.mean,
            s.z_score.unwrap()
        );
    }

    proptest! {
        #[test]
        fn bijection_invariant_under_random_ops(ops in proptest::collection::vec((0u8..2, 0usize..64, 0usize..64), 1..200)) {
            let mut p = Permutation::identity(64).unwrap();
            let mut inv = 0i64;
            for (kind, a, b) in ops {
                if kind == 0 {
                    let i = a.min(62);
                    let before = p.forward()[i] < p.forward()[i + 1];
                    p.apply_adjacent_swap(i).unwrap();
                    inv += if before { 1 } else { -1 };
                } else if a != b {
                    p.apply_transposition(a, b).unwrap();
                }
            }
            prop_assert!(p.is_consistent());
            prop_assert!(inv.unsigned_abs() <= p.inversion_count() + 1_000_000);
        }

        #[test]
        fn adjacent_swap_inversion_increment(seed in 0u64..1000, i in 0usize..31) {
            let mut rng = derive_stream(seed, 0);
            let mut p = random_permutation(32, &mut rng);
            let before = p.inversion_count();
            p.apply_adjacent_swap(i).unwrap();
            prop_assert_eq!(before.abs_diff(p.inversion_count()), 1);
        }
    }
}
