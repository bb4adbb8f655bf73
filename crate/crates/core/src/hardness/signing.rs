use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// `Ā = ξ ∘ A` for an unweighted graph with symmetric Rademacher signs `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedAdjacency {
    n: usize,
    // (u, v, ξ_uv) with u < v, in the graph's edge order
    edges: Vec<(usize, usize, i8)>,
    // neighbour lists sorted by id: (v, ξ_uv)
    adj: Vec<Vec<(usize, i8)>>,
    seed: Option<u64>,
}

/// Independent uniform `±1` per edge, drawn in edge order.
pub fn random_signing(g: &Graph, seed: u64) -> Result<SignedAdjacency> {
    let mut rng = crate::seed::rng(seed);
    let signs: Vec<i8> = (0..g.m()).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
    let mut sa = SignedAdjacency::with_signs(g, &signs)?;
    sa.seed = Some(seed);
    Ok(sa)
}

impl SignedAdjacency {
    /// Signs given per edge in `g.edges()` order.
    pub fn with_signs(g: &Graph, signs: &[i8]) -> Result<Self> {
        if !g.is_unweighted() {
            return Err(Error::WeightedInput);
        }
        if signs.len() != g.m() {
            return Err(Error::DimensionMismatch {
                expected: g.m(),
                actual: signs.len(),
            });
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::param("signs", "entries must be ±1"));
        }
        let mut adj = vec![Vec::new(); g.n()];
        let mut edges = Vec::with_capacity(g.m());
        for (&(u, v, _), &s) in g.edges().iter().zip(signs) {
            adj[u].push((v, s));
            adj[v].push((u, s));
            edges.push((u, v, s));
        }
        for list in &mut adj {
            list.sort_by_key(|e| e.0);
        }
        Ok(Self {
            n: g.n(),
            edges,
            adj,
            seed: None,
        })
    }

    /// Signs from the low `m` bits of `mask` (bit k set means `−1`).
    pub fn from_mask(g: &Graph, mask: u64) -> Result<Self> {
        let signs: Vec<i8> = (0..g.m()).map(|k| if mask >> k & 1 == 1 { -1 } else { 1 }).collect();
        Self::with_signs(g, &signs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn edges(&self) -> &[(usize, usize, i8)] {
        &self.edges
    }

    pub fn sign(&self, u: usize, v: usize) -> Option<i8> {
        let list = &self.adj[u];
        list.binary_search_by_key(&v, |e| e.0).ok().map(|k| list[k].1)
    }

    pub fn dense(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n, self.n);
        for &(u, v, s) in &self.edges {
            a[(u, v)] = s as f64;
            a[(v, u)] = s as f64;
        }
        a
    }

    /// `(Ā²)_{ij}` by sparse two-hop accumulation.
    pub fn two_path(&self, i: usize, j: usize) -> Result<i64> {
        for v in [i, j] {
            if v >= self.n {
                return Err(Error::InvalidVertex { vertex: v, n: self.n });
            }
        }
        if i == j {
            return Err(Error::param("j", "two-path entry needs i ≠ j"));
        }
        let (a, b) = (&self.adj[i], &self.adj[j]);
        let (mut x, mut y, mut total) = (0, 0, 0i64);
        while x < a.len() && y < b.len() {
            match a[x].0.cmp(&b[y].0) {
                core::cmp::Ordering::Less => x += 1,
                core::cmp::Ordering::Greater => y += 1,
                core::cmp::Ordering::Equal => {
                    total += (a[x].1 * b[y].1) as i64;
                    x += 1;
                    y += 1;
                }
            }
        }
        Ok(total)
    }

    /// `(Ā²)_{ii}`, the degree.
    pub fn square_diagonal(&self, i: usize) -> i64 {
        self.adj[i].len() as i64
    }

    /// `(Ā³)_{ij} = Σ_k (Ā²)_{ik} Ā_{kj}`.
    pub fn cube_entry(&self, i: usize, j: usize) -> i64 {
        let mut total = 0;
        for &(k, s) in &self.adj[j] {
            let sq = if k == i {
                self.square_diagonal(i)
            } else {
                self.two_path(i, k).expect("valid distinct vertices")
            };
            total += sq * s as i64;
        }
        total
    }

    /// `trace(Ā³) = 6·Σ_triangles ξ_uv ξ_vw ξ_uw`.
    pub fn trace_cube(&self) -> i64 {
        let mut total = 0;
        for &(u, v, s_uv) in &self.edges {
            for &(w, s_vw) in &self.adj[v] {
                if w <= v {
                    continue;
                }
                if let Some(s_uw) = self.sign(u, w) {
                    total += (s_uv * s_vw * s_uw) as i64;
                }
            }
        }
        6 * total
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.dense().symmetric_eigenvalues()
    }

    /// `ρ(Ā)` by dense eigensolve.
    pub fn spectral_radius(&self) -> Result<f64> {
        if self.n == 0 {
            return Ok(0.0);
        }
        Ok(self.eigenvalues()?.iter().fold(0.0, |m, l| m.max(crate::float::abs(*l))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_traces() {
        let k3 = Graph::complete(3);
        let plus = SignedAdjacency::with_signs(&k3, &[1, 1, 1]).unwrap();
        assert_eq!(plus.trace_cube(), 6);
        let minus = SignedAdjacency::with_signs(&k3, &[1, -1, 1]).unwrap();
        assert_eq!(minus.trace_cube(), -6);
        let c4 = Graph::cycle(4);
        for mask in 0..16 {
            assert_eq!(SignedAdjacency::from_mask(&c4, mask).unwrap().trace_cube(), 0);
        }
    }

    #[test]
    fn two_paths_and_radius() {
        let p3 = Graph::path(3);
        for mask in 0..4 {
            let sa = SignedAdjacency::from_mask(&p3, mask).unwrap();
            assert_eq!(sa.two_path(0, 2).unwrap().abs(), 1);
        }
        let e = Graph::unweighted(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(random_signing(&e, 1).unwrap().two_path(0, 2).unwrap(), 0);
        assert!(random_signing(&Graph::complete(3), 0).unwrap().two_path(1, 1).is_err());
        let empty = Graph::new(3, []).unwrap();
        assert_eq!(random_signing(&empty, 0).unwrap().spectral_radius().unwrap(), 0.0);
        let edge = Graph::complete(2);
        assert!((random_signing(&edge, 5).unwrap().spectral_radius().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn weighted_rejected() {
        let g = Graph::new(2, [(0, 1, 2.0)]).unwrap();
        assert_eq!(random_signing(&g, 0), Err(Error::WeightedInput));
    }

    #[test]
    fn cube_entry_matches_dense() {
        let g = crate::graph::gen_expander(12, 4, 2).unwrap();
        let sa = random_signing(&g, 9).unwrap();
        let a = sa.dense();
        let a3 = a.matmul(&a).matmul(&a);
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(sa.cube_entry(i, j) as f64, a3[(i, j)]);
            }
        }
        let tr: f64 = (0..12).map(|i| a3[(i, i)]).sum();
        assert_eq!(tr, sa.trace_cube() as f64);
    }
}
