#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resket_core::{DenseMatrix, Graph, SddMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian elimination with partial pivoting; independent of the eigen path.
pub fn gauss_solve(a: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut x = b.to_vec();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        x.swap(c, p);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            if f != 0.0 {
                for k in c..n {
                    m[r][k] -= f * m[c][k];
                }
                x[r] -= f * x[c];
            }
        }
    }
    for c in (0..n).rev() {
        let mut s = x[c];
        for k in c + 1..n {
            s -= m[c][k] * x[k];
        }
        x[c] = s / m[c][c];
    }
    x
}

/// `L† b` for a connected Laplacian and `b ⊥ 𝟙`, by grounding the last vertex
/// and re-centring.
pub fn laplacian_pinv_apply(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let g = DenseMatrix::from_fn(n - 1, n - 1, |i, j| l[(i, j)]);
    let mut y = gauss_solve(&g, &b[..n - 1]);
    y.push(0.0);
    let mean = y.iter().sum::<f64>() / n as f64;
    y.iter().map(|v| v - mean).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

pub fn delta(n: usize, i: usize, j: usize) -> Vec<f64> {
    let mut d = vec![0.0; n];
    d[i] += 1.0;
    d[j] -= 1.0;
    d
}

/// Random connected weighted graph: random spanning tree plus extra edges.
pub fn random_connected_graph(n: usize, extra: f64, weighted: bool, r: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let w = |r: &mut ChaCha8Rng| if weighted { r.random_range(0.2..3.0) } else { 1.0 };
    for v in 1..n {
        let u = r.random_range(0..v);
        seen.insert((u, v));
        let wt = w(r);
        edges.push((u, v, wt));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !seen.contains(&(u, v)) && r.random::<f64>() < extra {
                let wt = w(r);
                edges.push((u, v, wt));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Laplacian of a random connected graph plus a nonnegative diagonal slack;
/// with `slack = false` the result is singular with kernel 𝟙.
pub fn random_sdd(n: usize, slack: bool, r: &mut ChaCha8Rng) -> SddMatrix {
    let g = random_connected_graph(n, 0.3, true, r);
    let diag: Vec<f64> = g
        .degrees()
        .iter()
        .map(|d| if slack { d + r.random_range(0.0..1.0) } else { *d })
        .collect();
    SddMatrix::new(diag, g.edges().iter().copied()).unwrap()
}

/// Random unit vector orthogonal to `kernel` (orthonormal basis).
pub fn random_orthogonal(n: usize, kernel: &[Vec<f64>], r: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    for k in kernel {
        let c = dot(k, &x);
        for (xi, ki) in x.iter_mut().zip(k) {
            *xi -= c * ki;
        }
    }
    let nrm = dot(&x, &x).sqrt();
    x.iter().map(|v| v / nrm).collect()
}

/// `xᵀM†x` for `x ⊥ ker M`, via elimination (grounded when singular).
pub fn quadratic_pinv(m: &SddMatrix, x: &[f64]) -> f64 {
    let d = m.to_dense();
    let y = if m.kernel_dim() == 0 { gauss_solve(&d, x) } else { laplacian_pinv_apply(&d, x) };
    dot(x, &y)
}
