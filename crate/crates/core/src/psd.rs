//! Quadratic-form sketch `⟨Sx, SAx⟩` for well-conditioned PSD matrices.

use alloc::vec::Vec;

#[cfg(feature = "std")]
use rayon::prelude::*;

use crate::countsketch::{default_t, CountSketch};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::float::{abs, ceil, dot, norm2, sqrt};
use crate::sketch::{check_eps, SketchConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct PsdSketch {
    cs: CountSketch,
    sa: Vec<f64>,
    diag: Vec<f64>,
    kappa: f64,
    eps: f64,
    kernel: Vec<Vec<f64>>,
}

/// Raw fields of a [`PsdSketch`], for serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdParts {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub eps: f64,
    pub seed: u64,
    pub diag: Vec<f64>,
    pub sa: Vec<f64>,
    pub kappa: f64,
    pub kernel: Vec<Vec<f64>>,
}

impl PsdSketch {
    pub fn build(a: &DenseMatrix, eps: f64, cfg: &SketchConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        check_eps(eps)?;
        let (kappa, kernel) = psd_condition(a)?;
        let s = (ceil(cfg.c_s_psd * kappa / (eps * eps)) as usize).max(1);
        Self::build_with_buckets(a, eps, s, default_t(a.rows(), cfg.c_rep), seed, kappa, kernel)
    }

    fn build_with_buckets(
        a: &DenseMatrix,
        eps: f64,
        s: usize,
        t: usize,
        seed: u64,
        kappa: f64,
        kernel: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = a.rows();
        let cs = CountSketch::new(n, s, t, seed)?;
        let rows = cs.all_row_entries();
        // row r of S·A is Σ_j S_rj · A_j (A symmetric)
        let make_row = |entries: &Vec<(usize, f64)>| -> Vec<f64> {
            let mut out = alloc::vec![0.0; n];
            for &(j, sign) in entries {
                crate::float::axpy(sign, a.row(j), &mut out);
            }
            out
        };
        #[cfg(feature = "std")]
        let sa: Vec<Vec<f64>> = rows.par_iter().map(make_row).collect();
        #[cfg(not(feature = "std"))]
        let sa: Vec<Vec<f64>> = rows.iter().map(make_row).collect();
        Ok(Self {
            cs,
            sa: sa.concat(),
            diag: a.diagonal(),
            kappa,
            eps,
            kernel,
        })
    }

    pub fn from_parts(p: PsdParts) -> Result<Self> {
        let cs = CountSketch::new(p.n, p.s, p.t, p.seed)?;
        if p.sa.len() != cs.rows() * p.n || p.diag.len() != p.n {
            return Err(Error::DimensionMismatch {
                expected: cs.rows() * p.n,
                actual: p.sa.len(),
            });
        }
        Ok(Self {
            cs,
            sa: p.sa,
            diag: p.diag,
            kappa: p.kappa,
            eps: p.eps,
            kernel: p.kernel,
        })
    }

    pub fn to_parts(&self) -> PsdParts {
        PsdParts {
            n: self.n(),
            s: self.cs.s(),
            t: self.cs.t(),
            eps: self.eps,
            seed: self.cs.seed(),
            diag: self.diag.clone(),
            sa: self.sa.clone(),
            kappa: self.kappa,
            kernel: self.kernel.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn transform(&self) -> &CountSketch {
        &self.cs
    }

    pub fn payload_bytes(&self) -> usize {
        8 * (self.sa.len() + self.diag.len())
    }

    /// Estimate of `xᵀAx` for `x ⊥ ker A`.
    pub fn query(&self, x: &[f64]) -> Result<f64> {
        let n = self.n();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: x.len() });
        }
        let nx = norm2(x);
        if nx == 0.0 {
            return Ok(0.0);
        }
        let comp: f64 = self.kernel.iter().map(|k| dot(k, x)).map(|c| c * c).sum();
        let rel = sqrt(comp) / nx;
        if rel > 1e-8 {
            return Err(Error::KernelViolation { relative: rel });
        }
        let entries: Vec<(usize, f64)> =
            x.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect();
        let sv = self.cs.sketch_sparse(&entries)?;
        Ok(self.cs.estimate_with_rows(&sv, |r| {
            let row = &self.sa[r * n..(r + 1) * n];
            let mut acc = 0.0;
            for &(j, v) in &entries {
                acc += row[j] * v;
            }
            acc
        }))
    }
}

/// `κ(A) = λ_max/λ_min(nonzero)` and an orthonormal kernel basis; rejects
/// matrices with an eigenvalue below `−1e-10·‖A‖₂`.
pub fn psd_condition(a: &DenseMatrix) -> Result<(f64, Vec<Vec<f64>>)> {
    if !a.is_symmetric(1e-12) {
        return Err(Error::InvalidMatrix("PSD sketch needs a symmetric matrix".into()));
    }
    let eig = a.symmetric_eigen()?;
    let norm = eig.spectral_radius();
    if norm == 0.0 {
        return Err(Error::InvalidMatrix("zero matrix".into()));
    }
    let lo = eig.values[0];
    if lo < -1e-10 * norm {
        return Err(Error::NotPsd { lambda_min: lo });
    }
    let cutoff = 1e-10 * norm;
    let mut kernel = Vec::new();
    let mut lambda_min = f64::INFINITY;
    for (k, &l) in eig.values.iter().enumerate() {
        if abs(l) <= cutoff {
            kernel.push(eig.vector(k).to_vec());
        } else {
            lambda_min = lambda_min.min(l);
        }
    }
    Ok((norm / lambda_min, kernel))
}
