//! Asymmetric CountSketch of `M†` for SDD `M`, its quadratic-form query, and
//! the boosted effective-resistance sketch built from independent copies.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "std")]
use rayon::prelude::*;

use crate::countsketch::{default_t, CountSketch};
use crate::error::{Error, Result};
use crate::float::{ceil, ln, median, norm1, norm2, sqrt};
use crate::graph::Graph;
use crate::sdd::{EigenOptions, SddMatrix, Spectrum};
use crate::seed::derive_seed;

/// Tunable constants. `s = ceil(c_s·κ̄/ε)`, `t = ceil(2·ln(n)·c_rep)`,
/// `K = ceil(c_boost·ln n)` copies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SketchConfig {
    pub c_s: f64,
    pub c_rep: f64,
    pub c_boost: f64,
    /// Factor applied to `λ_min(M)` before it enters `β`.
    pub lambda_safety: f64,
    pub ns_threshold: f64,
    /// PSD sketch: `s = ceil(c_s_psd·κ(A)/ε²)`.
    pub c_s_psd: f64,
    pub eigen: EigenOptions,
}

impl Default for SketchConfig {
    fn default() -> Self {
        Self {
            c_s: 2.0,
            c_rep: 1.0,
            c_boost: 2.0,
            lambda_safety: 0.9,
            ns_threshold: 4.0,
            c_s_psd: 2.0,
            eigen: EigenOptions::default(),
        }
    }
}

impl SketchConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c_s", self.c_s),
            ("c_rep", self.c_rep),
            ("c_boost", self.c_boost),
            ("c_s_psd", self.c_s_psd),
            ("ns_threshold", self.ns_threshold),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, "must be positive and finite"));
            }
        }
        if !(self.lambda_safety > 0.0 && self.lambda_safety <= 1.0) {
            return Err(Error::param("lambda_safety", "must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn buckets(&self, kappa_bar: f64, eps: f64) -> usize {
        (ceil(self.c_s * kappa_bar / eps) as usize).max(1)
    }

    pub fn copies(&self, n: usize) -> usize {
        (ceil(self.c_boost * ln(n.max(2) as f64)) as usize).max(1)
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", "must lie in (0, 1)"));
    }
    Ok(())
}

/// `ns_D(x) = ‖D⁻¹x‖₁·‖x‖₁ / ‖D^{-1/2}x‖₂²` against a threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericalSparsityReport {
    pub ns_value: f64,
    pub threshold: f64,
    pub admissible: bool,
}

pub fn numerical_sparsity(d: &[f64], x: &[f64], threshold: f64) -> Result<NumericalSparsityReport> {
    if d.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            actual: x.len(),
        });
    }
    if d.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::param("d", "diagonal must be positive"));
    }
    let mut l1_dinv = 0.0;
    let mut l1 = 0.0;
    let mut l2_half = 0.0;
    for (xi, di) in x.iter().zip(d) {
        l1_dinv += crate::float::abs(xi / di);
        l1 += crate::float::abs(*xi);
        l2_half += xi * xi / di;
    }
    if l1 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let ns_value = l1_dinv * l1 / l2_half;
    Ok(NumericalSparsityReport {
        ns_value,
        threshold,
        admissible: ns_value <= threshold,
    })
}

/// Spectral data a build needs: extremes of `N̄` (for `κ̄`) and of `M`
/// (for `β` and the solver). Computing it once lets boosted copies share it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SketchSpectra {
    pub normalized: Spectrum,
    pub matrix: Spectrum,
}

impl SketchSpectra {
    pub fn compute(m: &SddMatrix, opts: &EigenOptions) -> Result<Self> {
        Ok(Self {
            normalized: m.normalized_spectrum(opts)?,
            matrix: m.spectrum(opts)?,
        })
    }

    pub fn kappa_bar(&self) -> f64 {
        self.normalized.lambda_max / self.normalized.lambda_min
    }
}

/// `β = 2·min(1, d_min³)·λ_min·ε / (max(1, d_max²)·sqrt(n·max(1, d_max)))`,
/// capped at 1/2.
pub fn beta_for(m: &SddMatrix, lambda_min: f64, eps: f64) -> f64 {
    let (dmin, dmax, n) = (m.d_min(), m.d_max(), m.n() as f64);
    let num = 2.0 * (dmin * dmin * dmin).min(1.0) * lambda_min * eps;
    let den = (dmax * dmax).max(1.0) * sqrt(n * dmax.max(1.0));
    (num / den).min(0.5)
}

/// Stored pair `(S, S̃ ≈ 2·S·D·M†)` with the diagonal of `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSketch {
    cs: CountSketch,
    s_tilde: Vec<f64>,
    diag: Vec<f64>,
    eps: f64,
    beta: f64,
    kappa_bar: f64,
    kernel: Vec<Vec<f64>>,
}

/// Raw fields of a [`SpectralSketch`], for serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct SketchParts {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub eps: f64,
    pub beta: f64,
    pub seed: u64,
    pub diag: Vec<f64>,
    pub s_tilde: Vec<f64>,
    pub kappa_bar: f64,
    pub kernel: Vec<Vec<f64>>,
}

impl SpectralSketch {
    pub fn build(m: &SddMatrix, eps: f64, cfg: &SketchConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        check_eps(eps)?;
        let spectra = SketchSpectra::compute(m, &cfg.eigen)?;
        Self::build_with_spectra(m, eps, cfg, seed, &spectra)
    }

    pub fn build_with_spectra(
        m: &SddMatrix,
        eps: f64,
        cfg: &SketchConfig,
        seed: u64,
        spectra: &SketchSpectra,
    ) -> Result<Self> {
        cfg.validate()?;
        check_eps(eps)?;
        let n = m.n();
        let kappa_bar = spectra.kappa_bar();
        let beta = beta_for(m, cfg.lambda_safety * spectra.matrix.lambda_min, eps);
        let solver = m.make_solver_with(beta, &spectra.matrix)?;
        let s = cfg.buckets(kappa_bar, eps);
        let t = default_t(n, cfg.c_rep);
        let cs = CountSketch::new(n, s, t, seed)?;
        let rows = cs.all_row_entries();
        let diag = m.diag().to_vec();

        // row r of S̃ is 2·Q(P·D·s_r): row r of 2·S·D·Q, transposed
        let solve_row = |(r, entries): (usize, &Vec<(usize, f64)>)| -> Result<Vec<f64>> {
            let mut u = vec![0.0; n];
            for &(j, sign) in entries {
                u[j] = sign * diag[j];
            }
            let x = solver
                .apply_projected(&u)
                .map_err(|e| Error::RowSolve { row: r, source: alloc::boxed::Box::new(e) })?;
            Ok(x.into_iter().map(|v| 2.0 * v).collect())
        };
        #[cfg(feature = "std")]
        let solved: Result<Vec<Vec<f64>>> = rows.par_iter().enumerate().map(solve_row).collect();
        #[cfg(not(feature = "std"))]
        let solved: Result<Vec<Vec<f64>>> = rows.iter().enumerate().map(solve_row).collect();
        let s_tilde = solved?.concat();

        Ok(Self {
            cs,
            s_tilde,
            diag,
            eps,
            beta,
            kappa_bar,
            kernel: m.kernel_basis(),
        })
    }

    pub fn from_parts(p: SketchParts) -> Result<Self> {
        let cs = CountSketch::new(p.n, p.s, p.t, p.seed)?;
        if p.diag.len() != p.n {
            return Err(Error::DimensionMismatch {
                expected: p.n,
                actual: p.diag.len(),
            });
        }
        if p.s_tilde.len() != cs.rows() * p.n {
            return Err(Error::DimensionMismatch {
                expected: cs.rows() * p.n,
                actual: p.s_tilde.len(),
            });
        }
        if p.kernel.iter().any(|k| k.len() != p.n) {
            return Err(Error::InvalidMatrix("kernel vector has wrong length".into()));
        }
        Ok(Self {
            cs,
            s_tilde: p.s_tilde,
            diag: p.diag,
            eps: p.eps,
            beta: p.beta,
            kappa_bar: p.kappa_bar,
            kernel: p.kernel,
        })
    }

    pub fn to_parts(&self) -> SketchParts {
        SketchParts {
            n: self.n(),
            s: self.cs.s(),
            t: self.cs.t(),
            eps: self.eps,
            beta: self.beta,
            seed: self.cs.seed(),
            diag: self.diag.clone(),
            s_tilde: self.s_tilde.clone(),
            kappa_bar: self.kappa_bar,
            kernel: self.kernel.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn transform(&self) -> &CountSketch {
        &self.cs
    }

    pub fn s_tilde(&self) -> &[f64] {
        &self.s_tilde
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kappa_bar(&self) -> f64 {
        self.kappa_bar
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    /// Payload size: `8·(3t·s·n + n)` bytes.
    pub fn payload_bytes(&self) -> usize {
        8 * (self.s_tilde.len() + self.diag.len())
    }

    fn kernel_residual(&self, b: &[f64]) -> f64 {
        let nb = norm2(b);
        let s: f64 = self.kernel.iter().map(|k| crate::float::dot(k, b)).map(|c| c * c).sum();
        sqrt(s) / nb
    }

    fn project(&self, b: &mut [f64]) {
        for k in &self.kernel {
            let c = crate::float::dot(k, b);
            crate::float::axpy(-c, k, b);
        }
    }

    /// Estimate of `bᵀM†b` for `b ⊥ ker M`.
    pub fn query(&self, b: &[f64]) -> Result<f64> {
        let b = self.checked_query_vector(b)?;
        Ok(self.estimate(&b))
    }

    /// Like [`query`](Self::query), with the numerical sparsity of `b`.
    pub fn query_with_report(&self, b: &[f64], threshold: f64) -> Result<(f64, NumericalSparsityReport)> {
        let value = self.query(b)?;
        Ok((value, numerical_sparsity(&self.diag, b, threshold)?))
    }

    /// Estimate of `(Pb)ᵀM†(Pb)` for any `b`, `P` the projection off the
    /// kernel. `S̃` already carries the projection, so `b` is used as is.
    pub fn query_unchecked(&self, b: &[f64]) -> Result<f64> {
        self.check_len(b)?;
        if norm2(b) == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.estimate(b))
    }

    /// Estimate of `(M†)_{ii}`.
    pub fn query_diagonal(&self, i: usize) -> Result<f64> {
        if i >= self.n() {
            return Err(Error::InvalidVertex { vertex: i, n: self.n() });
        }
        Ok(self.estimate_sparse(&[(i, 1.0)], 1.0))
    }

    /// `δ_abᵀM†δ_ab`.
    pub fn query_pair(&self, a: usize, b: usize) -> Result<f64> {
        let n = self.n();
        for v in [a, b] {
            if v >= n {
                return Err(Error::InvalidVertex { vertex: v, n });
            }
        }
        if a == b {
            return Err(Error::param("b", "pair endpoints must differ"));
        }
        let r = 1.0 / sqrt(2.0);
        let (lo, hi, slo) = if a < b { (a, b, r) } else { (b, a, -r) };
        Ok(self.estimate_sparse(&[(lo, slo), (hi, -slo)], 2.0))
    }

    /// Full-block evaluation of the same estimator, for cross-checking the
    /// support-restricted default path. Bit-identical to [`query`](Self::query).
    pub fn query_full_blocks(&self, b: &[f64]) -> Result<f64> {
        let b = self.checked_query_vector(b)?;
        let nb = norm2(&b);
        let bt: Vec<f64> = b.iter().map(|v| v / nb).collect();
        let dinv: Vec<f64> = bt.iter().zip(&self.diag).map(|(v, d)| v / d).collect();
        let sv = self.cs.sketch(&dinv)?;
        let n = self.n();
        let stb: Vec<f64> = (0..self.cs.rows())
            .map(|r| {
                let row = &self.s_tilde[r * n..(r + 1) * n];
                let mut acc = 0.0;
                for (x, y) in row.iter().zip(&bt) {
                    acc += x * y;
                }
                acc
            })
            .collect();
        let s = self.cs.s();
        let mut xs: Vec<f64> = (0..self.cs.blocks())
            .map(|blk| {
                let mut acc = 0.0;
                for k in blk * s..(blk + 1) * s {
                    acc += sv.values()[k] * stb[k];
                }
                acc
            })
            .collect();
        Ok(nb * nb * 0.5 * median(&mut xs))
    }

    fn check_len(&self, b: &[f64]) -> Result<()> {
        if b.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: b.len(),
            });
        }
        Ok(())
    }

    fn checked_query_vector(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.check_len(b)?;
        if norm2(b) == 0.0 {
            return Err(Error::ZeroVector);
        }
        let rel = self.kernel_residual(b);
        if rel > 1e-8 {
            return Err(Error::KernelViolation { relative: rel });
        }
        let mut b = b.to_vec();
        if rel > 0.0 {
            self.project(&mut b);
        }
        Ok(b)
    }

    fn estimate(&self, b: &[f64]) -> f64 {
        let nb = norm2(b);
        let entries: Vec<(usize, f64)> = b
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, v)| (j, v / nb))
            .collect();
        self.estimate_sparse(&entries, nb * nb)
    }

    // `unit` holds b̃ = b/‖b‖ sorted by index; `norm_sq` = ‖b‖².
    fn estimate_sparse(&self, unit: &[(usize, f64)], norm_sq: f64) -> f64 {
        let n = self.n();
        let dinv: Vec<(usize, f64)> = unit.iter().map(|&(j, v)| (j, v / self.diag[j])).collect();
        let sv = self.cs.sketch_sparse(&dinv).expect("indices validated by caller");
        let m = self.cs.estimate_with_rows(&sv, |r| {
            let row = &self.s_tilde[r * n..(r + 1) * n];
            let mut acc = 0.0;
            for &(j, v) in unit {
                acc += row[j] * v;
            }
            acc
        });
        norm_sq * 0.5 * m
    }
}

/// `K` independent sketches of `L_G` whose answers are combined by median.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostedResistanceSketch {
    n: usize,
    edges: Vec<(usize, usize)>,
    copies: Vec<SpectralSketch>,
}

impl BoostedResistanceSketch {
    pub fn build(g: &Graph, eps: f64, cfg: &SketchConfig, master_seed: u64) -> Result<Self> {
        cfg.validate()?;
        check_eps(eps)?;
        g.require_connected()?;
        let l = g.laplacian()?;
        let spectra = SketchSpectra::compute(&l, &cfg.eigen)?;
        Self::build_with_spectra(g, &l, eps, cfg, master_seed, &spectra)
    }

    pub fn build_with_spectra(
        g: &Graph,
        l: &SddMatrix,
        eps: f64,
        cfg: &SketchConfig,
        master_seed: u64,
        spectra: &SketchSpectra,
    ) -> Result<Self> {
        let k = cfg.copies(g.n());
        let mut copies = Vec::with_capacity(k);
        for i in 0..k {
            copies.push(SpectralSketch::build_with_spectra(
                l,
                eps,
                cfg,
                derive_seed(master_seed, i as u64),
                spectra,
            )?);
        }
        Ok(Self {
            n: g.n(),
            edges: g.edges().iter().map(|e| (e.0, e.1)).collect(),
            copies,
        })
    }

    pub fn from_parts(n: usize, edges: Vec<(usize, usize)>, copies: Vec<SpectralSketch>) -> Result<Self> {
        if copies.is_empty() {
            return Err(Error::param("copies", "need at least one sketch"));
        }
        if copies.iter().any(|c| c.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: copies.iter().map(|c| c.n()).find(|m| *m != n).unwrap_or(0),
            });
        }
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(Error::InvalidVertex { vertex: u.max(v), n });
        }
        Ok(Self { n, edges, copies })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn copies(&self) -> &[SpectralSketch] {
        &self.copies
    }

    pub fn payload_bytes(&self) -> usize {
        self.copies.iter().map(|c| c.payload_bytes()).sum()
    }

    pub fn query_resistance(&self, a: usize, b: usize) -> Result<f64> {
        let mut vals = Vec::with_capacity(self.copies.len());
        for c in &self.copies {
            vals.push(c.query_pair(a, b)?);
        }
        Ok(median(&mut vals))
    }

    pub fn estimate_all(&self, pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
        pairs.iter().map(|&(a, b)| self.query_resistance(a, b)).collect()
    }

    pub fn estimate_edges(&self) -> Result<Vec<f64>> {
        self.estimate_all(&self.edges)
    }
}

/// `‖x‖₁` for the product diagnostics in tests and reports.
pub fn l1_norm(x: &[f64]) -> f64 {
    norm1(x)
}
