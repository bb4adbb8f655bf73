//! Random instance generators shared by the verify suites and benches.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resket_core::{DenseMatrix, Graph, SddMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random spanning tree plus each remaining pair with probability `extra`;
/// weights uniform in [0.2, 3) when `weighted`.
pub fn connected_graph<R: Rng>(n: usize, extra: f64, weighted: bool, r: &mut R) -> Graph {
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    let weight = |r: &mut R| if weighted { r.random_range(0.2..3.0) } else { 1.0 };
    for v in 1..n {
        let u = r.random_range(0..v);
        seen.insert((u, v));
        edges.push((u, v, weight(r)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !seen.contains(&(u, v)) && r.random::<f64>() < extra {
                edges.push((u, v, weight(r)));
            }
        }
    }
    Graph::new(n, edges).expect("generated graph is valid")
}

/// Graph Laplacian with random signs on the off-diagonal (when `signed`) and
/// a random diagonal slack (when `slack`). Without slack and signs the
/// kernel is 𝟙.
pub fn sdd(n: usize, slack: bool, signed: bool, r: &mut impl Rng) -> SddMatrix {
    let g = connected_graph(n, 0.3, true, r);
    let diag = g
        .degrees()
        .iter()
        .map(|d| if slack { d + r.random_range(0.0..1.0) } else { *d })
        .collect();
    let off: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .map(|&(u, v, w)| (u, v, if signed && r.random::<bool>() { -w } else { w }))
        .collect();
    SddMatrix::new(diag, off).expect("generated matrix is SDD")
}

/// Random unit vector orthogonal to an orthonormal `kernel`.
pub fn unit_orthogonal(n: usize, kernel: &[Vec<f64>], r: &mut impl Rng) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        for k in kernel {
            let c: f64 = k.iter().zip(&x).map(|(a, b)| a * b).sum();
            for (xi, ki) in x.iter_mut().zip(k) {
                *xi -= c * ki;
            }
        }
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm > 1e-6 {
            return x.iter().map(|v| v / nrm).collect();
        }
    }
}

/// Symmetric, zero-diagonal, max absolute row sum equal to `scale`.
pub fn admissible_q(n: usize, signed: bool, scale: f64, r: &mut impl Rng) -> DenseMatrix {
    let mut q = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if r.random::<f64>() < 0.6 {
                let v: f64 = r.random_range(0.0..1.0);
                let v = if signed && r.random::<bool>() { -v } else { v };
                q[(i, j)] = v;
                q[(j, i)] = v;
            }
        }
    }
    let top = (0..n).map(|i| q.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    if top > 0.0 {
        q = q.scaled(scale / top);
    }
    q
}

/// `G(n, p)`.
pub fn gnp(n: usize, p: f64, r: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::unweighted(n, edges).expect("generated graph is valid")
}

/// `G(n, p)` with every edge closing a triangle removed, one at a time.
pub fn triangle_free(n: usize, p: f64, r: &mut impl Rng) -> Graph {
    let mut g = gnp(n, p, r);
    loop {
        let hit = g
            .edges()
            .iter()
            .find(|&&(u, v, _)| g.neighbor_ids(u).iter().any(|&w| g.has_edge(w, v)))
            .map(|&(u, v, _)| (u, v));
        match hit {
            Some((a, b)) => {
                let keep = g.edges().iter().filter(|&&(u, v, _)| (u, v) != (a, b)).map(|&(u, v, _)| (u, v));
                g = Graph::unweighted(n, keep.collect::<Vec<_>>()).expect("subgraph is valid");
            }
            None => return g,
        }
    }
}
