//! SDD effective resistances of `I − q` through graph resistances: split `q`
//! into a nonnegative doubled matrix, embed `I − Q` as a grounded Laplacian,
//! then recombine four graph resistances.

use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::float::abs;
use crate::graph::Graph;
use crate::oracle::DenseOracle;
use crate::sketch::{BoostedResistanceSketch, SketchConfig};

const RADIUS_LIMIT: f64 = 1.0 / 3.0;

/// `ρ(q)`, using the max absolute row sum when it already certifies the limit.
fn checked_radius(q: &DenseMatrix, abs_entries: bool) -> Result<f64> {
    let n = q.rows();
    let row_bound = (0..n)
        .map(|i| q.row(i).iter().map(|v| abs(*v)).sum::<f64>())
        .fold(0.0, f64::max);
    if row_bound <= RADIUS_LIMIT {
        return Ok(row_bound);
    }
    let m = if abs_entries {
        DenseMatrix::from_fn(n, n, |i, j| abs(q[(i, j)]))
    } else {
        q.clone()
    };
    let rho = m
        .symmetric_eigenvalues()?
        .into_iter()
        .fold(0.0_f64, |r, l| r.max(abs(l)));
    if rho > RADIUS_LIMIT * (1.0 + 1e-12) {
        return Err(Error::SpectralRadius { rho, limit: RADIUS_LIMIT });
    }
    Ok(rho)
}

fn check_square_symmetric(q: &DenseMatrix) -> Result<()> {
    if !q.is_square() {
        return Err(Error::InvalidMatrix("expected a square matrix".into()));
    }
    let scale = q.max_abs().max(1.0);
    if !q.is_symmetric(1e-12 * scale) {
        return Err(Error::InvalidMatrix("expected a symmetric matrix".into()));
    }
    Ok(())
}

/// `Q = [[P, N], [N, P]]` with `P = max(q, 0)`, `N = max(−q, 0)` entrywise.
/// `ρ(Q) = ρ(|q|)`, which must be at most 1/3.
pub fn doubling_transform(q: &DenseMatrix) -> Result<DenseMatrix> {
    check_square_symmetric(q)?;
    checked_radius(q, true)?;
    let n = q.rows();
    Ok(DenseMatrix::from_fn(2 * n, 2 * n, |a, b| {
        let v = q[(a % n, b % n)];
        let same_block = (a < n) == (b < n);
        match (same_block, v > 0.0) {
            (true, true) => v,
            (false, false) => -v,
            _ => 0.0,
        }
    }))
}

/// Graph on `n + 1` vertices whose Laplacian, grounded at the extra vertex
/// `n`, equals `I − q`: edge `q_ij` between `i < j` and `1 − Σ_j q_ij` to `n`.
pub fn expander_embedding(q: &DenseMatrix) -> Result<Graph> {
    check_square_symmetric(q)?;
    let n = q.rows();
    if let Some(v) = q.data().iter().find(|v| **v < 0.0) {
        return Err(Error::InvalidMatrix(alloc::format!("negative entry {v} in embedding input")));
    }
    checked_radius(q, false)?;
    let mut edges = Vec::new();
    for i in 0..n {
        let row = q.row(i);
        for (j, &w) in row.iter().enumerate().skip(i + 1) {
            if w > 0.0 {
                edges.push((i, j, w));
            }
        }
        let v = 1.0 - row.iter().sum::<f64>();
        if v < -1e-12 {
            return Err(Error::InvalidMatrix(alloc::format!(
                "row {i} of I − q has negative sum {v}"
            )));
        }
        if v > 0.0 {
            edges.push((i, n, v));
        }
    }
    Graph::new(n + 1, edges)
}

/// Second-smallest Laplacian eigenvalue, by dense eigensolve.
pub fn embedding_lambda2(g: &Graph) -> Result<f64> {
    if g.n() < 2 {
        return Err(Error::param("g", "need at least two vertices"));
    }
    Ok(g.laplacian_dense().symmetric_eigenvalues()?[1])
}

/// `δ_ijᵀ(I − q)^{-1}δ_ij` from resistances `r` of the embedded doubled
/// matrix (vertex `n + i` is the second copy of `i`).
pub fn doubled_recovery<F>(n: usize, i: usize, j: usize, mut r: F) -> Result<f64>
where
    F: FnMut(usize, usize) -> Result<f64>,
{
    if i == j {
        return Ok(0.0);
    }
    Ok(0.5 * (r(i, n + i)? + r(j, n + j)?) - r(i, n + j)? + r(i, j)?)
}

/// Source of graph resistances on the embedded graph.
#[derive(Debug, Clone, PartialEq)]
pub enum ResistanceEstimator {
    ExactOracle,
    /// Boosted sketch. The recovered values are combinations of four graph
    /// resistances, each within `[2/(1+ρ), 2/(1−ρ)] ⊂ [3/2, 3]`, so the
    /// sketch is built at `eps / 6` to keep the combination within `eps`.
    Sketch { eps: f64, config: SketchConfig, seed: u64 },
}

pub(crate) enum PreparedEstimator {
    Exact(DenseOracle),
    Sketch(BoostedResistanceSketch),
}

impl PreparedEstimator {
    pub(crate) fn resistance(&self, a: usize, b: usize) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        match self {
            PreparedEstimator::Exact(o) => Ok(o.resistance(a, b)),
            PreparedEstimator::Sketch(s) => s.query_resistance(a, b),
        }
    }
}

impl ResistanceEstimator {
    pub(crate) fn prepare(&self, g: &Graph) -> Result<PreparedEstimator> {
        match self {
            ResistanceEstimator::ExactOracle => Ok(PreparedEstimator::Exact(DenseOracle::from_graph(g)?)),
            ResistanceEstimator::Sketch { eps, config, seed } => Ok(PreparedEstimator::Sketch(
                BoostedResistanceSketch::build(g, eps / 6.0, config, *seed)?,
            )),
        }
    }
}

/// `δ_ijᵀ(I − q)^{-1}δ_ij` for each requested pair, via the doubled embedding.
pub fn sdd_resistances_via_graph(
    q: &DenseMatrix,
    pairs: &[(usize, usize)],
    estimator: &ResistanceEstimator,
) -> Result<Vec<f64>> {
    let n = q.rows();
    if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| a >= n || b >= n) {
        return Err(Error::InvalidVertex { vertex: a.max(b), n });
    }
    let doubled = doubling_transform(q)?;
    let g = expander_embedding(&doubled)?;
    let est = estimator.prepare(&g)?;
    pairs
        .iter()
        .map(|&(i, j)| doubled_recovery(n, i, j, |a, b| est.resistance(a, b)))
        .collect()
}
