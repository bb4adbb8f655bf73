//! CountSketch with `3t` independent blocks of `s` signed buckets, and the
//! median-of-blocks inner-product estimator.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::{ceil, ln, median, norm1, norm2};
use crate::seed::mix64;

/// Hash-defined `3t·s × n` sparse sign matrix. Fully determined by
/// `(n, s, t, seed)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSketch {
    n: usize,
    s: usize,
    t: usize,
    seed: u64,
    // block-major: entry [block * n + col]
    buckets: Vec<u32>,
    signs: Vec<f64>,
}

#[inline]
fn column_hash(seed: u64, block: usize, col: usize) -> u64 {
    mix64(mix64(seed ^ mix64(block as u64)) ^ (col as u64))
}

impl CountSketch {
    pub fn new(n: usize, s: usize, t: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "dimension must be positive"));
        }
        if s == 0 || s > u32::MAX as usize {
            return Err(Error::param("s", "bucket count must be in 1..=u32::MAX"));
        }
        if t == 0 {
            return Err(Error::param("t", "repetition count must be positive"));
        }
        let blocks = 3 * t;
        let mut buckets = Vec::with_capacity(blocks * n);
        let mut signs = Vec::with_capacity(blocks * n);
        for b in 0..blocks {
            for j in 0..n {
                let h = column_hash(seed, b, j);
                buckets.push(((h as u128 * s as u128) >> 64) as u32);
                signs.push(if mix64(h ^ 0x2545_f491_4f6c_dd1d) & 1 == 0 { 1.0 } else { -1.0 });
            }
        }
        Ok(Self {
            n,
            s,
            t,
            seed,
            buckets,
            signs,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn s(&self) -> usize {
        self.s
    }

    #[inline]
    pub fn t(&self) -> usize {
        self.t
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn blocks(&self) -> usize {
        3 * self.t
    }

    /// Total row count `3t·s`.
    #[inline]
    pub fn rows(&self) -> usize {
        3 * self.t * self.s
    }

    #[inline]
    pub fn bucket(&self, block: usize, col: usize) -> usize {
        self.buckets[block * self.n + col] as usize
    }

    #[inline]
    pub fn sign(&self, block: usize, col: usize) -> f64 {
        self.signs[block * self.n + col]
    }

    /// Row index hit by column `col` in `block`.
    #[inline]
    pub fn row_of(&self, block: usize, col: usize) -> usize {
        block * self.s + self.bucket(block, col)
    }

    fn same_transform(&self, other: &CountSketch) -> bool {
        (self.n, self.s, self.t, self.seed) == (other.n, other.s, other.t, other.seed)
    }

    /// Columns of row `r` of `S` with their signs, ascending by column.
    pub fn row_entries(&self, r: usize) -> Vec<(usize, f64)> {
        let (block, bucket) = (r / self.s, r % self.s);
        (0..self.n)
            .filter(|&j| self.bucket(block, j) == bucket)
            .map(|j| (j, self.sign(block, j)))
            .collect()
    }

    /// All rows at once: `rows[r]` lists `(col, sign)` ascending by column.
    pub fn all_row_entries(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rows = vec![Vec::new(); self.rows()];
        for b in 0..self.blocks() {
            for j in 0..self.n {
                rows[self.row_of(b, j)].push((j, self.sign(b, j)));
            }
        }
        rows
    }

    pub fn sketch(&self, v: &[f64]) -> Result<SketchedVector> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: v.len(),
            });
        }
        let mut values = vec![0.0; self.rows()];
        for b in 0..self.blocks() {
            let base = b * self.s;
            for (j, &x) in v.iter().enumerate() {
                values[base + self.bucket(b, j)] += self.sign(b, j) * x;
            }
        }
        Ok(SketchedVector {
            values,
            transform: (self.n, self.s, self.t, self.seed),
        })
    }

    /// Sketch of a sparse vector given as `(index, value)` entries, keeping
    /// only touched buckets. Accumulation order matches [`sketch`](Self::sketch).
    pub fn sketch_sparse(&self, entries: &[(usize, f64)]) -> Result<SparseSketch> {
        let mut sorted: Vec<(usize, f64)> = entries.to_vec();
        sorted.sort_by_key(|e| e.0);
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::param("entries", "repeated index in sparse vector"));
            }
        }
        if let Some(&(j, _)) = sorted.last() {
            if j >= self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    actual: j + 1,
                });
            }
        }
        let mut blocks = Vec::with_capacity(self.blocks());
        let mut scratch: Vec<(usize, f64)> = Vec::with_capacity(sorted.len());
        for b in 0..self.blocks() {
            scratch.clear();
            scratch.extend(sorted.iter().map(|&(j, x)| (self.bucket(b, j), self.sign(b, j) * x)));
            // stable: equal buckets keep column order
            scratch.sort_by_key(|e| e.0);
            let mut touched: Vec<(usize, f64)> = Vec::new();
            for &(k, c) in &scratch {
                match touched.last_mut() {
                    Some(last) if last.0 == k => last.1 += c,
                    _ => touched.push((k, 0.0 + c)),
                }
            }
            blocks.push(touched);
        }
        Ok(SparseSketch {
            blocks,
            transform: (self.n, self.s, self.t, self.seed),
        })
    }

    /// Per-block inner products `⟨block_i(sv), block_i(sw)⟩`.
    pub fn block_estimates(&self, sv: &SketchedVector, sw: &SketchedVector) -> Result<Vec<f64>> {
        let id = (self.n, self.s, self.t, self.seed);
        if sv.transform != id || sw.transform != id {
            return Err(Error::TransformMismatch);
        }
        Ok((0..self.blocks())
            .map(|b| {
                let lo = b * self.s;
                let mut acc = 0.0;
                for k in lo..lo + self.s {
                    acc += sv.values[k] * sw.values[k];
                }
                acc
            })
            .collect())
    }

    /// Median over blocks of the per-block inner products.
    pub fn estimate(&self, sv: &SketchedVector, sw: &SketchedVector) -> Result<f64> {
        let mut xs = self.block_estimates(sv, sw)?;
        Ok(median(&mut xs))
    }

    /// Same value as sketching `sparse_v` densely and calling
    /// [`estimate`](Self::estimate), touching only the buckets it hits.
    pub fn estimate_from_sparse(&self, sparse_v: &[(usize, f64)], sw: &SketchedVector) -> Result<f64> {
        if sw.transform != (self.n, self.s, self.t, self.seed) {
            return Err(Error::TransformMismatch);
        }
        let sv = self.sketch_sparse(sparse_v)?;
        Ok(self.estimate_with_rows(&sv, |r| sw.values[r]))
    }

    /// Per-block sums `Σ_b sv_b · row_value(block·s + b)` over touched
    /// buckets, ascending; `row_value` supplies the other side lazily.
    pub fn block_estimates_with_rows(
        &self,
        sv: &SparseSketch,
        mut row_value: impl FnMut(usize) -> f64,
    ) -> Vec<f64> {
        sv.blocks
            .iter()
            .enumerate()
            .map(|(b, touched)| {
                let mut acc = 0.0;
                for &(k, x) in touched {
                    acc += x * row_value(b * self.s + k);
                }
                acc
            })
            .collect()
    }

    pub fn estimate_with_rows(&self, sv: &SparseSketch, row_value: impl FnMut(usize) -> f64) -> f64 {
        let mut xs = self.block_estimates_with_rows(sv, row_value);
        median(&mut xs)
    }

    pub fn is_compatible(&self, other: &CountSketch) -> bool {
        self.same_transform(other)
    }
}

/// A dense sketch `S v` tagged with the transform that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SketchedVector {
    values: Vec<f64>,
    transform: (usize, usize, usize, u64),
}

impl SketchedVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Block `i` (0-based), `s` consecutive rows.
    pub fn block(&self, i: usize) -> &[f64] {
        let s = self.transform.1;
        &self.values[i * s..(i + 1) * s]
    }
}

/// Sketch of a sparse vector: per block, touched `(bucket, value)` pairs
/// ascending by bucket.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSketch {
    blocks: Vec<Vec<(usize, f64)>>,
    transform: (usize, usize, usize, u64),
}

impl SparseSketch {
    pub fn block(&self, i: usize) -> &[(usize, f64)] {
        &self.blocks[i]
    }

    pub fn touched_rows(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }
}

/// `t = ceil(2·ln(n)·c_rep)`, at least 1.
pub fn default_t(n: usize, c_rep: f64) -> usize {
    (ceil(2.0 * ln(n.max(2) as f64) * c_rep) as usize).max(1)
}

/// Bucket count making one block fail with probability at most 1/4 by
/// Chebyshev, from the per-block variance bound
/// `min(3‖v‖₁²‖w‖₁²/s², 2‖v‖₂²‖w‖₂²/s)`.
pub fn bucket_count_for(v: &[f64], w: &[f64], eps: f64) -> Result<usize> {
    let ip = crate::float::dot(v, w);
    if ip == 0.0 {
        return Err(Error::param("v, w", "inner product is zero"));
    }
    let target = eps * crate::float::abs(ip);
    let l1 = norm1(v) * norm1(w);
    let l2 = norm2(v) * norm2(w);
    // Var ≤ 3 l1²/s² ≤ target²/4  ⇔  s ≥ 2√3·l1/target
    let s_l1 = 2.0 * crate::float::sqrt(3.0) * l1 / target;
    // Var ≤ 2 l2²/s ≤ target²/4  ⇔  s ≥ 8·l2²/target²
    let s_l2 = 8.0 * l2 * l2 / (target * target);
    Ok(ceil(s_l1.min(s_l2)) as usize)
}

/// `P[Bin(blocks, p) ≥ ceil(blocks/2)]`: the chance that at least half the
/// blocks fail when each fails independently with probability `p`. The median
/// can only be wrong in that event.
pub fn median_failure_bound(blocks: usize, p: f64) -> f64 {
    let need = blocks.div_ceil(2);
    let q = 1.0 - p;
    let mut total = 0.0;
    for k in need..=blocks {
        let mut term = 1.0;
        // C(blocks, k) p^k q^(blocks-k), built multiplicatively
        for i in 0..k {
            term *= (blocks - i) as f64 / (k - i) as f64 * p;
        }
        for _ in 0..(blocks - k) {
            term *= q;
        }
        total += term;
    }
    total.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_entry_per_block() {
        let cs = CountSketch::new(20, 7, 2, 11).unwrap();
        let mut e = vec![0.0; 20];
        e[3] = 1.0;
        let sv = cs.sketch(&e).unwrap();
        for b in 0..cs.blocks() {
            let nz: Vec<_> = sv.block(b).iter().filter(|x| **x != 0.0).collect();
            assert_eq!(nz.len(), 1);
            assert_eq!(nz[0].abs(), 1.0);
        }
        assert_eq!(cs.estimate(&sv, &sv).unwrap(), 1.0);
    }

    #[test]
    fn deterministic_and_linear() {
        let a = CountSketch::new(30, 5, 3, 99).unwrap();
        assert_eq!(a, CountSketch::new(30, 5, 3, 99).unwrap());
        let v: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let w: Vec<f64> = (0..30).map(|i| (i % 4) as f64 - 1.5).collect();
        let comb: Vec<f64> = v.iter().zip(&w).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
        let (sv, sw, sc) = (a.sketch(&v).unwrap(), a.sketch(&w).unwrap(), a.sketch(&comb).unwrap());
        for k in 0..a.rows() {
            let lin = 2.0 * sv.values()[k] - 3.0 * sw.values()[k];
            assert!((lin - sc.values()[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn sparse_path_is_bit_identical() {
        let cs = CountSketch::new(40, 6, 2, 5).unwrap();
        let w: Vec<f64> = (0..40).map(|i| ((i * 7919) % 13) as f64 / 13.0 - 0.4).collect();
        let sw = cs.sketch(&w).unwrap();
        let entries = [(17, -0.75), (2, 1.25), (33, 0.5)];
        let mut dense = vec![0.0; 40];
        for &(j, x) in &entries {
            dense[j] = x;
        }
        let full = cs.estimate(&cs.sketch(&dense).unwrap(), &sw).unwrap();
        let fast = cs.estimate_from_sparse(&entries, &sw).unwrap();
        assert_eq!(full.to_bits(), fast.to_bits());
    }

    #[test]
    fn mismatched_transforms() {
        let a = CountSketch::new(10, 4, 1, 1).unwrap();
        let b = CountSketch::new(10, 4, 1, 2).unwrap();
        let x = a.sketch(&[1.0; 10]).unwrap();
        let y = b.sketch(&[1.0; 10]).unwrap();
        assert_eq!(a.estimate(&x, &y), Err(Error::TransformMismatch));
    }

    #[test]
    fn binomial_tail() {
        // one block: fails with probability p
        assert!((median_failure_bound(1, 0.25) - 0.25).abs() < 1e-15);
        // three blocks: P[≥2 of 3]
        let p: f64 = 0.25;
        let exact = 3.0 * p * p * (1.0 - p) + p * p * p;
        assert!((median_failure_bound(3, p) - exact).abs() < 1e-15);
    }
}
