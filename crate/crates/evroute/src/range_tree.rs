//! Static 2D range structure over `(k1, k2, tag)` triples.
//!
//! Built fresh per key pair per pass, never updated. The contract is the
//! query result: every query must match a linear scan over the stored pairs.
//! `NegInf` in `k2` means "no recorded value" and is ignored by maxima and
//! existence tests; pairs with `NegInf` in `k1` are unreachable by any finite
//! range and are dropped at build time.

use crate::gain::Gain;

#[derive(Clone, Debug)]
pub struct MaxRangeTree2D {
    /// Sorted by (k1, tag).
    k1: Vec<i64>,
    k2: Vec<Gain>,
    tags: Vec<u32>,
    /// Sparse table over indices: best (max k2, then min tag) per power-of-two
    /// window. `table[l][i]` covers `i .. i + 2^l`.
    table: Vec<Vec<u32>>,
    /// Suffix minimum of finite k2 values (`i64::MAX` when none).
    suffix_min_k2: Vec<i64>,
    /// Segment-tree-of-sorted-lists for the box query; level 0 is the leaves.
    /// Entries are (k2, tag, original position), sorted by (k2 asc, tag desc)
    /// within each aligned block so the last entry `<= cap` carries the
    /// smallest tag for its k2.
    merge_levels: Vec<Vec<(i64, u32, u32)>>,
}

impl MaxRangeTree2D {
    pub fn build<I: IntoIterator<Item = (Gain, Gain, u32)>>(pairs: I) -> Self {
        let mut entries: Vec<(i64, Gain, u32)> = pairs
            .into_iter()
            .filter_map(|(k1, k2, tag)| k1.finite().map(|k1| (k1, k2, tag)))
            .collect();
        entries.sort_unstable_by(|a, b| (a.0, a.2).cmp(&(b.0, b.2)));
        let n = entries.len();
        let k1: Vec<i64> = entries.iter().map(|e| e.0).collect();
        let k2: Vec<Gain> = entries.iter().map(|e| e.1).collect();
        let tags: Vec<u32> = entries.iter().map(|e| e.2).collect();

        let better = |a: u32, b: u32, k2: &[Gain], tags: &[u32]| -> u32 {
            let (ka, kb) = (k2[a as usize], k2[b as usize]);
            if ka > kb || (ka == kb && tags[a as usize] <= tags[b as usize]) {
                a
            } else {
                b
            }
        };

        let levels = if n == 0 { 0 } else { n.ilog2() as usize + 1 };
        let mut table: Vec<Vec<u32>> = Vec::with_capacity(levels);
        if n > 0 {
            table.push((0..n as u32).collect());
            for l in 1..levels {
                let half = 1usize << (l - 1);
                let prev = &table[l - 1];
                let width = n - (1usize << l) + 1;
                let mut row = Vec::with_capacity(width);
                for i in 0..width {
                    row.push(better(prev[i], prev[i + half], &k2, &tags));
                }
                table.push(row);
            }
        }

        let mut suffix_min_k2 = vec![i64::MAX; n + 1];
        for i in (0..n).rev() {
            let v = k2[i].finite().unwrap_or(i64::MAX);
            suffix_min_k2[i] = suffix_min_k2[i + 1].min(v);
        }

        // NegInf k2 entries get an i64::MIN sentinel here; box queries skip
        // them explicitly.
        let mut merge_levels: Vec<Vec<(i64, u32, u32)>> = Vec::new();
        if n > 0 {
            let mut level: Vec<(i64, u32, u32)> = Vec::with_capacity(n);
            for i in 0..n {
                level.push((k2[i].finite().unwrap_or(i64::MIN), tags[i], i as u32));
            }
            merge_levels.push(level);
            let mut size = 1usize;
            while size < n {
                let mut next = merge_levels.last().unwrap().clone();
                let mut start = 0;
                while start < n {
                    let end = (start + 2 * size).min(n);
                    next[start..end].sort_unstable_by(|a, b| (a.0, b.1).cmp(&(b.0, a.1)));
                    start = end;
                }
                merge_levels.push(next);
                size *= 2;
            }
        }

        MaxRangeTree2D {
            k1,
            k2,
            tags,
            table,
            suffix_min_k2,
            merge_levels,
        }
    }

    pub fn len(&self) -> usize {
        self.k1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k1.is_empty()
    }

    fn lower_bound(&self, x: i64) -> usize {
        self.k1.partition_point(|&v| v < x)
    }

    fn upper_bound(&self, x: i64) -> usize {
        self.k1.partition_point(|&v| v <= x)
    }

    fn entry(&self, i: usize) -> (Gain, Gain, u32) {
        (Gain::Finite(self.k1[i]), self.k2[i], self.tags[i])
    }

    /// Best index in `[lo, hi)` by (max k2, min tag), or None.
    fn best_in_span(&self, lo: usize, hi: usize) -> Option<usize> {
        if lo >= hi {
            return None;
        }
        let l = (hi - lo).ilog2() as usize;
        let a = self.table[l][lo] as usize;
        let b = self.table[l][hi - (1usize << l)] as usize;
        let best = if self.k2[a] > self.k2[b]
            || (self.k2[a] == self.k2[b] && self.tags[a] <= self.tags[b])
        {
            a
        } else {
            b
        };
        Some(best)
    }

    /// Among pairs with `k1 in [lo, hi]`, the one maximizing k2 (ties: the
    /// smallest tag). An inverted range is an empty result, not an error.
    pub fn max_k2_in_k1_range(&self, lo: i64, hi: i64) -> Option<(Gain, Gain, u32)> {
        if lo > hi {
            return None;
        }
        let a = self.lower_bound(lo);
        let b = self.upper_bound(hi);
        let best = self.best_in_span(a, b)?;
        if !self.k2[best].is_finite() {
            return None;
        }
        Some(self.entry(best))
    }

    /// Among pairs with `k1 <= k1_hi` and `k2 <= k2_cap`, the one maximizing
    /// k2 (ties: the smallest tag).
    pub fn max_k2_in_box(&self, k1_hi: i64, k2_cap: i64) -> Option<(Gain, Gain, u32)> {
        let end = self.upper_bound(k1_hi);
        if end == 0 {
            return None;
        }
        let n = self.k1.len();
        let mut best: Option<(i64, u32, u32)> = None;
        // Walk the implicit segment tree: cover [0, end) with maximal
        // aligned blocks, binary-searching each block's sorted k2 list.
        let mut pos = 0usize;
        while pos < end {
            // Largest level whose block starting at pos fits inside [0, end).
            let mut level = self.merge_levels.len() - 1;
            loop {
                let size = 1usize << level;
                if pos % size == 0 && pos + size <= end && pos + size <= n {
                    break;
                }
                level -= 1;
            }
            let size = 1usize << level;
            let block = &self.merge_levels[level][pos..pos + size];
            // Last entry with k2 <= cap; the block ordering makes that entry
            // carry the smallest tag for its k2.
            let idx = block.partition_point(|&(k2, _, _)| k2 <= k2_cap);
            if idx > 0 {
                let (k2, tag, orig) = block[idx - 1];
                if k2 != i64::MIN {
                    let cand = (k2, tag, orig);
                    best = Some(match best {
                        None => cand,
                        Some(cur) => {
                            if k2 > cur.0 || (k2 == cur.0 && tag < cur.1) {
                                cand
                            } else {
                                cur
                            }
                        }
                    });
                }
            }
            pos += size;
        }
        best.map(|(k2, tag, orig)| (Gain::Finite(self.k1[orig as usize]), Gain::Finite(k2), tag))
    }

    /// True iff some pair has `k1 >= k1_lo` and finite `k2 <= k2_cap`.
    pub fn exists_in_quadrant(&self, k1_lo: i64, k2_cap: i64) -> bool {
        let start = self.lower_bound(k1_lo);
        self.suffix_min_k2[start] <= k2_cap
    }

    /// The pair witnessing [`Self::exists_in_quadrant`]: minimum finite k2
    /// among pairs with `k1 >= k1_lo`, provided it is `<= k2_cap` (ties: the
    /// smallest tag).
    pub fn min_k2_in_quadrant(&self, k1_lo: i64, k2_cap: i64) -> Option<(Gain, Gain, u32)> {
        let start = self.lower_bound(k1_lo);
        let target = self.suffix_min_k2[start];
        if target > k2_cap {
            return None;
        }
        let mut best: Option<usize> = None;
        for i in start..self.k1.len() {
            if self.k2[i] == Gain::Finite(target)
                && best.map_or(true, |b| self.tags[i] < self.tags[b])
            {
                best = Some(i);
            }
        }
        best.map(|i| self.entry(i))
    }
}

/// Reference implementation used by the equivalence tests.
pub mod linear {
    use super::*;

    pub fn max_k2_in_k1_range(
        pairs: &[(Gain, Gain, u32)],
        lo: i64,
        hi: i64,
    ) -> Option<(Gain, Gain, u32)> {
        pairs
            .iter()
            .filter(|(k1, k2, _)| {
                k1.finite().map_or(false, |v| lo <= v && v <= hi) && k2.is_finite()
            })
            .min_by_key(|(_, k2, tag)| (std::cmp::Reverse(*k2), *tag))
            .copied()
    }

    pub fn max_k2_in_box(
        pairs: &[(Gain, Gain, u32)],
        k1_hi: i64,
        k2_cap: i64,
    ) -> Option<(Gain, Gain, u32)> {
        pairs
            .iter()
            .filter(|(k1, k2, _)| {
                k1.finite().map_or(false, |v| v <= k1_hi)
                    && k2.finite().map_or(false, |v| v <= k2_cap)
            })
            .min_by_key(|(_, k2, tag)| (std::cmp::Reverse(*k2), *tag))
            .copied()
    }

    pub fn exists_in_quadrant(pairs: &[(Gain, Gain, u32)], k1_lo: i64, k2_cap: i64) -> bool {
        pairs.iter().any(|(k1, k2, _)| {
            k1.finite().map_or(false, |v| v >= k1_lo)
                && k2.finite().map_or(false, |v| v <= k2_cap)
        })
    }

    pub fn min_k2_in_quadrant(
        pairs: &[(Gain, Gain, u32)],
        k1_lo: i64,
        k2_cap: i64,
    ) -> Option<(Gain, Gain, u32)> {
        pairs
            .iter()
            .filter(|(k1, k2, _)| {
                k1.finite().map_or(false, |v| v >= k1_lo)
                    && k2.finite().map_or(false, |v| v <= k2_cap)
            })
            .min_by_key(|(_, k2, tag)| (*k2, *tag))
            .copied()
    }
}
