#![allow(dead_code)]
//! Reference linear algebra for the integration tests, written without the
//! library's dense or eigen code.

/// Row-major square matrix as nested vectors.
pub type Mat = Vec<Vec<f64>>;

pub fn to_mat(a: &resket_core::DenseMatrix) -> Mat {
    (0..a.rows()).map(|i| a.row(i).to_vec()).collect()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &Mat, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m = a.clone();
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
        let s: f64 = (c + 1..n).map(|k| m[c][k] * x[k]).sum();
        x[c] = (x[c] - s) / m[c][c];
    }
    x
}

/// Inverse by Gauss-Jordan with partial pivoting.
pub fn invert(a: &Mat) -> Mat {
    let n = a.len();
    let mut m: Mat = a.clone();
    let mut inv: Mat = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        inv.swap(c, p);
        let d = m[c][c];
        for k in 0..n {
            m[c][k] /= d;
            inv[c][k] /= d;
        }
        let (mc, ic) = (m[c].clone(), inv[c].clone());
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    for k in 0..n {
                        m[r][k] -= f * mc[k];
                        inv[r][k] -= f * ic[k];
                    }
                }
            }
        }
    }
    inv
}

/// `A⁺y` for symmetric `a` whose kernel is spanned by `k` (unit, last entry
/// nonzero) and `y ⊥ k`: fix the last coordinate at zero, solve, then
/// project off `k`.
pub fn pinv_apply_rank_one_kernel(a: &Mat, y: &[f64], k: &[f64]) -> Vec<f64> {
    let n = y.len();
    let g: Mat = (0..n - 1).map(|i| a[i][..n - 1].to_vec()).collect();
    let mut x = gauss_solve(&g, &y[..n - 1]);
    x.push(0.0);
    let c = dot(&x, k);
    x.iter().zip(k).map(|(xi, ki)| xi - c * ki).collect()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(a: &Mat) -> Vec<f64> {
    let n = a.len();
    let mut m = a.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        let scale: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn matvec(a: &Mat, x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| dot(r, x)).collect()
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

/// Laplacian from an edge list.
pub fn laplacian(n: usize, edges: &[(usize, usize, f64)]) -> Mat {
    let mut l = vec![vec![0.0; n]; n];
    for &(u, v, w) in edges {
        l[u][u] += w;
        l[v][v] += w;
        l[u][v] -= w;
        l[v][u] -= w;
    }
    l
}

/// All effective resistances of a connected graph from the inverse of the
/// Laplacian grounded at the last vertex.
pub struct GroundedResistance {
    inv: Mat,
}

impl GroundedResistance {
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let l = laplacian(n, edges);
        let g: Mat = (0..n - 1).map(|i| l[i][..n - 1].to_vec()).collect();
        Self { inv: invert(&g) }
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        let k = self.inv.len();
        let e = |i: usize, j: usize| if i < k && j < k { self.inv[i][j] } else { 0.0 };
        e(a, a) + e(b, b) - 2.0 * e(a, b)
    }
}
