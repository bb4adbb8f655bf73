//! Lanczos iteration with full reorthogonalization for the extreme
//! eigenvalues of a symmetric operator restricted to the complement of a
//! known invariant subspace.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::float::{abs, dot, norm2};

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Krylov dimension cap.
    pub max_dim: usize,
    /// Ritz residual target relative to the largest Ritz value.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_dim: 600,
            tol: 1e-8,
            seed: 0x1a2b_3c4d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremeEigenvalues {
    pub min: f64,
    pub max: f64,
    /// Ritz residual norms, bounding the distance to a true eigenvalue.
    pub min_residual: f64,
    pub max_residual: f64,
    pub steps: usize,
}

/// Smallest and largest eigenvalue of `A` on the orthogonal complement of
/// `deflate` (orthonormal, assumed `A`-invariant). `matvec(x, y)` writes `Ax`
/// into `y`.
pub fn lanczos_extremes(
    n: usize,
    mut matvec: impl FnMut(&[f64], &mut [f64]),
    deflate: &[Vec<f64>],
    opts: &LanczosOptions,
) -> Result<ExtremeEigenvalues> {
    let dim = n.saturating_sub(deflate.len());
    if dim == 0 {
        return Err(Error::InvalidMatrix("operator has no complement to deflate into".into()));
    }
    let max_dim = opts.max_dim.min(dim).max(1);
    let mut rng = crate::seed::rng(opts.seed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    orthogonalize(&mut q, deflate);
    let nq = norm2(&q);
    if nq == 0.0 {
        return Err(Error::InvalidMatrix("degenerate Lanczos start vector".into()));
    }
    q.iter_mut().for_each(|x| *x /= nq);

    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut last = None;
    loop {
        let j = basis.len() - 1;
        matvec(&basis[j], &mut w);
        orthogonalize(&mut w, deflate);
        let alpha = dot(&basis[j], &w);
        alphas.push(alpha);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                crate::float::axpy(-c, b, &mut w);
            }
            orthogonalize(&mut w, deflate);
        }
        let beta = norm2(&w);
        let k = alphas.len();
        let exhausted = k >= max_dim || beta <= 1e-13 * alphas.iter().fold(0.0, |m: f64, a| m.max(abs(*a))).max(1e-300);
        if k % 8 == 0 || exhausted {
            let est = ritz_extremes(&alphas, &betas, beta)?;
            let scale = abs(est.max).max(abs(est.min)).max(f64::MIN_POSITIVE);
            let done = est.min_residual <= opts.tol * scale && est.max_residual <= opts.tol * scale;
            last = Some(est);
            if done || beta <= 1e-13 * scale {
                return Ok(ExtremeEigenvalues { steps: k, ..est });
            }
        }
        if exhausted {
            let est = last.expect("estimate computed at exhaustion");
            if k >= dim {
                // full Krylov space: Ritz values are exact
                return Ok(ExtremeEigenvalues { steps: k, ..est });
            }
            return Err(Error::EigenNonConvergence {
                residual: est.min_residual.max(est.max_residual),
            });
        }
        betas.push(beta);
        let next: Vec<f64> = w.iter().map(|x| x / beta).collect();
        basis.push(next);
    }
}

fn orthogonalize(x: &mut [f64], against: &[Vec<f64>]) {
    for v in against {
        let c = dot(v, x);
        crate::float::axpy(-c, v, x);
    }
}

fn ritz_extremes(alphas: &[f64], betas: &[f64], next_beta: f64) -> Result<ExtremeEigenvalues> {
    let k = alphas.len();
    let mut t = DenseMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen()?;
    let lo = eig.vector(0);
    let hi = eig.vector(k - 1);
    Ok(ExtremeEigenvalues {
        min: eig.values[0],
        max: eig.values[k - 1],
        min_residual: abs(next_beta * lo[k - 1]),
        max_residual: abs(next_beta * hi[k - 1]),
        steps: k,
    })
}
