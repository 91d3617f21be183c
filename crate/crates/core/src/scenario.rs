//! Lexicographic enumeration of k-subsets of the real arcs.
//!
//! Scenario `i` is the `i`-th k-subset of `{1, ..., m}` in lexicographic
//! order of sorted subsets; ranking and unranking go through the
//! combinatorial number system, so nothing is materialized.

use crate::error::{Error, Result};
use crate::network::ArcId;

/// `C(n, k)`, or `None` on `u64` overflow.
pub fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioIndex {
    m: usize,
    k: usize,
    len: usize,
}

impl ScenarioIndex {
    /// All k-subsets of `m` arcs. Requires `1 <= k <= m`.
    pub fn new(m: usize, k: usize) -> Result<Self> {
        if k == 0 || k > m {
            return Err(Error::invalid(format!("k = {k} must lie in 1..={m} (number of arcs)")));
        }
        let len = binomial(m, k)
            .and_then(|c| usize::try_from(c).ok())
            .ok_or_else(|| Error::Budget(format!("C({m},{k}) does not fit in memory indices")))?;
        Ok(ScenarioIndex { m, k, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn arc_count(&self) -> usize {
        self.m
    }

    /// The `i`-th subset, sorted ascending.
    pub fn subset(&self, mut i: usize) -> Vec<ArcId> {
        assert!(i < self.len, "scenario {i} out of range ({} scenarios)", self.len);
        let mut out = Vec::with_capacity(self.k);
        let mut next = 1;
        for slot in 0..self.k {
            let remaining = self.k - slot - 1;
            loop {
                // Subsets whose current slot holds `next`.
                let block = binomial(self.m - next, remaining).unwrap() as usize;
                if i < block {
                    break;
                }
                i -= block;
                next += 1;
            }
            out.push(ArcId(next));
            next += 1;
        }
        out
    }

    /// Position of a subset, or `None` if it is not a k-subset of `1..=m`.
    pub fn index_of(&self, subset: &[ArcId]) -> Option<usize> {
        if subset.len() != self.k {
            return None;
        }
        let mut sorted: Vec<usize> = subset.iter().map(|a| a.0).collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) || sorted[0] == 0 || sorted[self.k - 1] > self.m {
            return None;
        }
        let mut rank = 0usize;
        let mut next = 1;
        for (slot, &c) in sorted.iter().enumerate() {
            let remaining = self.k - slot - 1;
            for v in next..c {
                rank += binomial(self.m - v, remaining).unwrap() as usize;
            }
            next = c + 1;
        }
        Some(rank)
    }

    pub fn iter(&self) -> Subsets {
        Subsets { m: self.m, current: (1..=self.k).collect(), done: false }
    }
}

/// Lexicographic successor iterator over k-subsets.
#[derive(Debug, Clone)]
pub struct Subsets {
    m: usize,
    current: Vec<usize>,
    done: bool,
}

impl Iterator for Subsets {
    type Item = Vec<ArcId>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = self.current.iter().map(|&a| ArcId(a)).collect();
        let k = self.current.len();
        // Rightmost slot that can still move up.
        match (0..k).rev().find(|&i| self.current[i] < self.m - (k - 1 - i)) {
            Some(i) => {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}
