//! Weighted undirected graphs in CSR form, Laplacian views, spectral
//! statistics and a random regular expander generator.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::float::{abs, sqrt};
use crate::sdd::{EigenOptions, SddMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
}

impl Graph {
    /// Builds a graph from an edge list. Endpoint order within an edge is
    /// irrelevant; each undirected edge may appear only once.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidVertex { vertex: u.max(v), n });
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has non-positive or non-finite weight {w}"
                )));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", key.0, key.1)));
            }
            list.push((key.0, key.1, w));
        }
        Ok(Self::from_validated(n, list))
    }

    pub fn unweighted(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    fn from_validated(n: usize, mut edges: Vec<(usize, usize, f64)>) -> Self {
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut counts = vec![0usize; n + 1];
        for &(u, v, _) in &edges {
            counts[u + 1] += 1;
            counts[v + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut targets = vec![0; 2 * edges.len()];
        let mut weights = vec![0.0; 2 * edges.len()];
        let mut degrees = vec![0.0; n];
        for &(u, v, w) in &edges {
            targets[fill[u]] = v;
            weights[fill[u]] = w;
            fill[u] += 1;
            targets[fill[v]] = u;
            weights[fill[v]] = w;
            fill[v] += 1;
            degrees[u] += w;
            degrees[v] += w;
        }
        // Sort each adjacency list by target for deterministic traversal.
        for u in 0..n {
            let (lo, hi) = (offsets[u], offsets[u + 1]);
            let mut pairs: Vec<(usize, f64)> =
                (lo..hi).map(|k| (targets[k], weights[k])).collect();
            pairs.sort_by_key(|p| p.0);
            for (k, (t, w)) in (lo..hi).zip(pairs) {
                targets[k] = t;
                weights[k] = w;
            }
        }
        Self {
            n,
            edges,
            offsets,
            targets,
            weights,
            degrees,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v, 1.0));
            }
        }
        Self::from_validated(n, edges)
    }

    pub fn path(n: usize) -> Self {
        Self::from_validated(n, (1..n).map(|v| (v - 1, v, 1.0)).collect())
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v, 1.0)).collect();
        edges.push((0, n - 1, 1.0));
        Self::from_validated(n, edges)
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5, 1.0));
            edges.push((i, i + 5, 1.0));
            edges.push((5 + i, 5 + (i + 2) % 5, 1.0));
        }
        Self::new(10, edges).expect("petersen edges are valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.offsets[u], self.offsets[u + 1]);
        self.targets[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }

    pub fn neighbor_ids(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> f64 {
        self.degrees[u]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Number of incident edges, ignoring weights.
    pub fn edge_degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn d_max(&self) -> f64 {
        self.degrees.iter().copied().fold(0.0, f64::max)
    }

    pub fn d_min(&self) -> f64 {
        self.degrees.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let ids = self.neighbor_ids(u);
        ids.binary_search(&v)
            .ok()
            .map(|k| self.weights[self.offsets[u] + k])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.neighbor_ids(u).binary_search(&v).is_ok()
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.2 == 1.0)
    }

    /// Connected component label per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &v in self.neighbor_ids(u) {
                    if label[v] == usize::MAX {
                        label[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().1 == 1
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidGraph("resistance needs at least 2 vertices".into()));
        }
        let (_, c) = self.components();
        if c != 1 {
            return Err(Error::Disconnected { components: c });
        }
        Ok(())
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::InvalidVertex { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    /// `L = D − A` as an SDD matrix. Fails if some vertex is isolated.
    pub fn laplacian(&self) -> Result<SddMatrix> {
        SddMatrix::from_graph(self)
    }

    pub fn adjacency_dense(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n, self.n);
        for &(u, v, w) in &self.edges {
            a[(u, v)] = w;
            a[(v, u)] = w;
        }
        a
    }

    pub fn laplacian_dense(&self) -> DenseMatrix {
        let mut l = self.adjacency_dense().scaled(-1.0);
        for i in 0..self.n {
            l[(i, i)] = self.degrees[i];
        }
        l
    }

    /// Number of triangles (each counted once).
    pub fn triangle_count(&self) -> usize {
        let mut count = 0;
        for &(u, v, _) in &self.edges {
            // common neighbours w > v keep each triangle counted once
            let (a, b) = (self.neighbor_ids(u), self.neighbor_ids(v));
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    core::cmp::Ordering::Less => i += 1,
                    core::cmp::Ordering::Greater => j += 1,
                    core::cmp::Ordering::Equal => {
                        if a[i] > v {
                            count += 1;
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        count
    }

    pub fn has_triangle(&self) -> bool {
        self.triangle_count() > 0
    }

    /// A copy with one extra edge.
    pub fn with_edge(&self, u: usize, v: usize, w: f64) -> Result<Self> {
        Self::new(self.n, self.edges.iter().copied().chain(core::iter::once((u, v, w))))
    }
}

/// Normalized-Laplacian spectral summary with Cheeger bounds on conductance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralStats {
    pub lambda2_norm: f64,
    pub lambda_max_norm: f64,
    pub kappa_bar: f64,
    pub cheeger_lower: f64,
    pub cheeger_upper: f64,
}

impl SpectralStats {
    pub fn is_expander(&self, kappa_threshold: f64) -> bool {
        self.kappa_bar <= kappa_threshold
    }
}

pub fn spectral_stats(g: &Graph, tol: f64) -> Result<SpectralStats> {
    spectral_stats_with(g, &EigenOptions { tol, ..EigenOptions::default() })
}

pub fn spectral_stats_with(g: &Graph, opts: &EigenOptions) -> Result<SpectralStats> {
    g.require_connected()?;
    let l = g.laplacian()?;
    let spec = l.normalized_spectrum(opts)?;
    let lambda2 = spec.lambda_min;
    Ok(SpectralStats {
        lambda2_norm: lambda2,
        lambda_max_norm: spec.lambda_max,
        kappa_bar: spec.lambda_max / lambda2,
        cheeger_lower: lambda2 / 2.0,
        cheeger_upper: sqrt(2.0 * lambda2),
    })
}

/// Random simple connected `d`-regular graph on `n` vertices.
///
/// Points of the configuration model are paired one pair at a time; a pair
/// creating a loop or a repeated edge is redrawn, and a stuck pairing is
/// restarted. Disconnected results are discarded.
pub fn gen_expander(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d < 3 {
        return Err(Error::param("d", "degree must be at least 3"));
    }
    if d >= n {
        return Err(Error::param("d", format!("degree {d} needs more than {d} vertices")));
    }
    if (n * d) % 2 != 0 {
        return Err(Error::param("n", "n·d must be even"));
    }
    const MAX_ATTEMPTS: usize = 1000;
    let mut rng = crate::seed::rng(seed);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(edges) = try_pairing(n, d, &mut rng) {
            let g = Graph::from_validated(n, edges);
            if g.is_connected() {
                return Ok(g);
            }
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_ATTEMPTS })
}

fn try_pairing(n: usize, d: usize, rng: &mut impl Rng) -> Option<Vec<(usize, usize, f64)>> {
    let mut points: Vec<usize> = (0..n * d).map(|p| p / d).collect();
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(n * d / 2);
    while !points.is_empty() {
        let len = points.len();
        let mut placed = false;
        for _ in 0..(50 + 4 * len) {
            let i = rng.random_range(0..len);
            let j = rng.random_range(0..len);
            if i == j {
                continue;
            }
            let (u, v) = (points[i], points[j]);
            if u == v || seen.contains(&(u.min(v), u.max(v))) {
                continue;
            }
            seen.insert((u.min(v), u.max(v)));
            edges.push((u.min(v), u.max(v), 1.0));
            let (hi, lo) = (i.max(j), i.min(j));
            points.swap_remove(hi);
            points.swap_remove(lo);
            placed = true;
            break;
        }
        if !placed {
            return None;
        }
    }
    Some(edges)
}

/// Max absolute Laplacian row sum relative to `d_max`; zero up to rounding.
pub fn laplacian_row_sum_defect(g: &Graph) -> f64 {
    let mut worst: f64 = 0.0;
    for u in 0..g.n() {
        let s: f64 = g.degree(u) - g.neighbors(u).map(|(_, w)| w).sum::<f64>();
        worst = worst.max(abs(s));
    }
    worst / g.d_max().max(f64::MIN_POSITIVE)
}
