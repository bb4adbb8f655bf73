//! Dense brute-force ground truth: pseudoinverses, effective resistances,
//! spectral sums, truncated power series, and exhaustive conductance.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dd::DoubleDouble;
use crate::dense::{DenseMatrix, SymmetricEigen};
use crate::error::{Error, Result};
use crate::float::{abs, dot, exp, ln, powf, sqrt};
use crate::graph::Graph;
use crate::sdd::SddMatrix;

pub const DEFAULT_DENSE_CAP: usize = 3000;
pub const DEFAULT_PINV_THRESHOLD: f64 = 1e-10;

/// Dense symmetric matrix with its eigendecomposition and pseudoinverse.
#[derive(Debug, Clone)]
pub struct DenseOracle {
    matrix: DenseMatrix,
    eigen: SymmetricEigen,
    rank: usize,
    cutoff: f64,
    pinv: DenseMatrix,
}

impl DenseOracle {
    pub fn new(m: &DenseMatrix) -> Result<Self> {
        Self::with_options(m, DEFAULT_PINV_THRESHOLD, DEFAULT_DENSE_CAP)
    }

    /// `threshold` is relative to the largest eigenvalue magnitude.
    pub fn with_options(m: &DenseMatrix, threshold: f64, cap: usize) -> Result<Self> {
        if m.rows() > cap {
            return Err(Error::DenseCapExceeded { n: m.rows(), cap });
        }
        if !m.is_symmetric(1e-12) {
            return Err(Error::InvalidMatrix("oracle needs a symmetric matrix".into()));
        }
        let eigen = m.symmetric_eigen()?;
        let cutoff = threshold * eigen.spectral_radius();
        let rank = eigen.values.iter().filter(|l| abs(**l) > cutoff).count();
        let pinv = eigen.spectral_map(|l| if abs(l) > cutoff { Some(1.0 / l) } else { None });
        Ok(Self {
            matrix: m.clone(),
            eigen,
            rank,
            cutoff,
            pinv,
        })
    }

    pub fn from_graph(g: &Graph) -> Result<Self> {
        Self::from_graph_capped(g, DEFAULT_DENSE_CAP)
    }

    pub fn from_graph_capped(g: &Graph, cap: usize) -> Result<Self> {
        if g.n() > cap {
            return Err(Error::DenseCapExceeded { n: g.n(), cap });
        }
        Self::with_options(&g.laplacian_dense(), DEFAULT_PINV_THRESHOLD, cap)
    }

    pub fn from_sdd(m: &SddMatrix) -> Result<Self> {
        Self::new(&m.to_dense())
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> &SymmetricEigen {
        &self.eigen
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn pinv(&self) -> &DenseMatrix {
        &self.pinv
    }

    /// Eigenvalues treated as nonzero, ascending.
    pub fn nonzero_eigenvalues(&self) -> Vec<f64> {
        self.eigen.values.iter().copied().filter(|l| abs(*l) > self.cutoff).collect()
    }

    /// `‖VΛVᵀ − M‖_F / ‖M‖_F`.
    pub fn reconstruction_error(&self) -> f64 {
        let rec = self.eigen.reconstruct();
        rec.sub(&self.matrix).frobenius_norm() / self.matrix.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    pub fn pinv_apply(&self, x: &[f64]) -> Vec<f64> {
        self.pinv.matvec(x)
    }

    /// `xᵀ M† x`.
    pub fn quadratic_pinv(&self, x: &[f64]) -> f64 {
        self.pinv.quadratic_form(x)
    }

    /// `δ_abᵀ M† δ_ab` read off the cached pseudoinverse.
    pub fn resistance(&self, a: usize, b: usize) -> f64 {
        let p = &self.pinv;
        p[(a, a)] + p[(b, b)] - p[(a, b)] - p[(b, a)]
    }

    /// Projection of `x` onto the numerical kernel.
    pub fn kernel_component(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for (k, l) in self.eigen.values.iter().enumerate() {
            if abs(*l) <= self.cutoff {
                let v = self.eigen.vector(k);
                crate::float::axpy(dot(v, x), v, &mut out);
            }
        }
        out
    }
}

pub fn exact_resistance(g: &Graph, a: usize, b: usize) -> Result<f64> {
    g.check_vertex(a)?;
    g.check_vertex(b)?;
    g.require_connected()?;
    Ok(DenseOracle::from_graph(g)?.resistance(a, b))
}

pub fn exact_quadratic_pinv(m: &DenseMatrix, x: &[f64]) -> Result<f64> {
    if x.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            actual: x.len(),
        });
    }
    Ok(DenseOracle::new(m)?.quadratic_pinv(x))
}

/// Functions `f` for spectral sums `S_f(A) = Σ f(σ_i(A))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralFunction {
    /// `σ^p`
    SchattenP(f64),
    /// `σ log σ`
    SvdEntropy,
    /// `log σ`
    LogDet,
    /// `e^σ`
    TraceExp,
}

impl SpectralFunction {
    pub const SCHATTEN_3: Self = SpectralFunction::SchattenP(3.0);

    /// Value at `sigma`; `None` where undefined (logarithms at zero).
    pub fn eval(self, sigma: f64) -> Option<f64> {
        match self {
            SpectralFunction::SchattenP(p) => Some(powf(sigma, p)),
            SpectralFunction::SvdEntropy => (sigma > 0.0).then(|| sigma * ln(sigma)),
            SpectralFunction::LogDet => (sigma > 0.0).then(|| ln(sigma)),
            SpectralFunction::TraceExp => Some(exp(sigma)),
        }
    }

    /// `c_k` in `f(1 + x) = Σ_k c_k x^k`.
    pub fn taylor_coefficient(self, k: u32) -> DoubleDouble {
        let kf = DoubleDouble::from_f64(k as f64);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        match self {
            SpectralFunction::SchattenP(p) => {
                // binom(p, k) = Π_{i<k} (p − i)/(i + 1)
                let mut c = DoubleDouble::ONE;
                for i in 0..k {
                    c = c * DoubleDouble::from_f64(p - i as f64) / DoubleDouble::from_f64(i as f64 + 1.0);
                }
                c
            }
            SpectralFunction::SvdEntropy => match k {
                0 => DoubleDouble::ZERO,
                1 => DoubleDouble::ONE,
                _ => DoubleDouble::from_f64(sign) / (kf * DoubleDouble::from_f64(k as f64 - 1.0)),
            },
            SpectralFunction::LogDet => match k {
                0 => DoubleDouble::ZERO,
                _ => DoubleDouble::from_f64(-sign) / kf,
            },
            SpectralFunction::TraceExp => {
                let mut c = DoubleDouble::E;
                for i in 1..=k {
                    c = c / DoubleDouble::from_f64(i as f64);
                }
                c
            }
        }
    }

    /// Highest nonzero Taylor degree when `f` is a polynomial.
    pub fn polynomial_degree(self) -> Option<u32> {
        match self {
            SpectralFunction::SchattenP(p) if p >= 0.0 && p == (p as u32) as f64 => Some(p as u32),
            _ => None,
        }
    }

    pub fn name(self) -> String {
        match self {
            SpectralFunction::SchattenP(p) => format!("schatten_{p}"),
            SpectralFunction::SvdEntropy => "svd_entropy".into(),
            SpectralFunction::LogDet => "log_det".into(),
            SpectralFunction::TraceExp => "trace_exp".into(),
        }
    }

    /// Parses `schatten_3`, `schatten_p` (p = 4), `schatten_<p>`,
    /// `svd_entropy`, `log_det`, `trace_exp`.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "svd_entropy" => Some(SpectralFunction::SvdEntropy),
            "log_det" => Some(SpectralFunction::LogDet),
            "trace_exp" => Some(SpectralFunction::TraceExp),
            "schatten_p" => Some(SpectralFunction::SchattenP(4.0)),
            _ => s
                .strip_prefix("schatten_")
                .and_then(|p| p.parse::<f64>().ok())
                .filter(|p| p.is_finite() && *p > 0.0)
                .map(SpectralFunction::SchattenP),
        }
    }
}

/// Singular values of a square matrix (`|λ|` when symmetric).
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    if a.is_symmetric(0.0) {
        return Ok(a.symmetric_eigenvalues()?.into_iter().map(abs).collect());
    }
    let ata = a.transpose().matmul(a);
    Ok(ata
        .symmetric_eigenvalues()?
        .into_iter()
        .map(|l| sqrt(l.max(0.0)))
        .collect())
}

/// `Σ f(σ_i(A))`. With `restrict_nonzero`, singular values below
/// `1e-12·σ_max` are skipped; otherwise an undefined value is an error.
pub fn exact_spectral_sum(a: &DenseMatrix, f: SpectralFunction, restrict_nonzero: bool) -> Result<f64> {
    if a.rows() > DEFAULT_DENSE_CAP {
        return Err(Error::DenseCapExceeded { n: a.rows(), cap: DEFAULT_DENSE_CAP });
    }
    let sv = singular_values(a)?;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let mut total = 0.0;
    for s in sv {
        if restrict_nonzero && s <= 1e-12 * smax {
            continue;
        }
        total += f.eval(s).ok_or(Error::UndefinedSpectralValue { sigma: s })?;
    }
    Ok(total)
}

/// `Σ_i f(1 + x_i)` in double-double via the Taylor series about 1, for
/// shifts `|x_i| < 1`. Polynomial `f` is summed exactly to its degree.
pub fn spectral_sum_near_identity(shifts: &[DoubleDouble], f: SpectralFunction) -> DoubleDouble {
    let degree = f.polynomial_degree();
    let max_k = degree.unwrap_or(400);
    let coeffs: Vec<DoubleDouble> = (0..=max_k).map(|k| f.taylor_coefficient(k)).collect();
    let mut total = DoubleDouble::ZERO;
    for &x in shifts {
        let mut power = DoubleDouble::ONE;
        let mut acc = DoubleDouble::ZERO;
        for (k, c) in coeffs.iter().enumerate() {
            let term = *c * power;
            acc = acc + term;
            if degree.is_none() && k > 3 && abs(term.hi) < 1e-40 * abs(acc.hi).max(1e-300) {
                break;
            }
            power = power * x;
        }
        total = total + acc;
    }
    total
}

/// `Σ_{j≤k} Ā^j D^{-1/2} x` with `Ā = I − N̄/2`, dense.
pub fn truncated_neumann(m: &SddMatrix, x: &[f64], k: usize) -> Vec<f64> {
    let lazy = lazy_walk_dense(m);
    let mut term: Vec<f64> = x.iter().zip(m.diag()).map(|(v, d)| v / sqrt(*d)).collect();
    let mut sum = term.clone();
    for _ in 0..k {
        term = lazy.matvec(&term);
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
    }
    sum
}

/// `I − N̄/2` as a dense matrix.
pub fn lazy_walk_dense(m: &SddMatrix) -> DenseMatrix {
    let nb = m.normalized_dense();
    DenseMatrix::identity(m.n()).sub(&nb.scaled(0.5))
}

/// `(N̄/2)† D^{-1/2} x`, dense.
pub fn half_normalized_pinv_apply(m: &SddMatrix, x: &[f64]) -> Result<Vec<f64>> {
    let oracle = DenseOracle::new(&m.normalized_dense())?;
    let y: Vec<f64> = x.iter().zip(m.diag()).map(|(v, d)| v / sqrt(*d)).collect();
    Ok(oracle.pinv_apply(&y).into_iter().map(|v| 2.0 * v).collect())
}

/// Exact conductance `min_S w(∂S)/min(vol S, vol S̄)` by enumeration.
pub fn exact_conductance(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n < 2 || n > 24 {
        return Err(Error::param("n", "exhaustive conductance needs 2 ≤ n ≤ 24"));
    }
    let total: f64 = g.degrees().iter().sum();
    let mut best = f64::INFINITY;
    // fix vertex n−1 outside S to visit each cut once
    for mask in 1u32..(1u32 << (n - 1)) {
        let inside = |v: usize| v < n - 1 && mask & (1 << v) != 0;
        let mut vol = 0.0;
        let mut cut = 0.0;
        for u in 0..n {
            if inside(u) {
                vol += g.degree(u);
            }
        }
        for &(u, v, w) in g.edges() {
            if inside(u) != inside(v) {
                cut += w;
            }
        }
        let denom = vol.min(total - vol);
        if denom > 0.0 {
            best = best.min(cut / denom);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resistances_of_small_graphs() {
        let g = Graph::new(2, [(0, 1, 4.0)]).unwrap();
        assert!((exact_resistance(&g, 0, 1).unwrap() - 0.25).abs() < 1e-12);
        let k3 = Graph::complete(3);
        assert!((exact_resistance(&k3, 0, 2).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        for n in 4..=8 {
            let r = exact_resistance(&Graph::complete(n), 1, 3).unwrap();
            assert!((r - 2.0 / n as f64).abs() < 1e-12);
        }
        let p3 = Graph::path(3);
        assert!((exact_resistance(&p3, 0, 2).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_forms() {
        let id = DenseMatrix::identity(3);
        assert!((exact_quadratic_pinv(&id, &[1.0, 2.0, 2.0]).unwrap() - 9.0).abs() < 1e-12);
        let two = id.scaled(2.0);
        assert!((exact_quadratic_pinv(&two, &[1.0, 0.0, 0.0]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn spectral_sums() {
        let id = DenseMatrix::identity(3);
        let s3 = exact_spectral_sum(&id, SpectralFunction::SCHATTEN_3, false).unwrap();
        assert!((s3 - 3.0).abs() < 1e-12);
        let d = DenseMatrix::from_diagonal(&[1.0, 2.0]);
        let te = exact_spectral_sum(&d, SpectralFunction::TraceExp, false).unwrap();
        assert!((te - (exp(1.0) + exp(2.0))).abs() < 1e-12);
        assert_eq!(exact_spectral_sum(&id, SpectralFunction::SvdEntropy, false).unwrap(), 0.0);
        let z = DenseMatrix::from_diagonal(&[0.0, 2.0]);
        assert!(matches!(
            exact_spectral_sum(&z, SpectralFunction::LogDet, false),
            Err(Error::UndefinedSpectralValue { .. })
        ));
        assert!((exact_spectral_sum(&z, SpectralFunction::LogDet, true).unwrap() - ln(2.0)).abs() < 1e-12);
    }

    #[test]
    fn taylor_series_match_direct_evaluation() {
        let fs = [
            SpectralFunction::SCHATTEN_3,
            SpectralFunction::SchattenP(4.0),
            SpectralFunction::SchattenP(2.5),
            SpectralFunction::SvdEntropy,
            SpectralFunction::LogDet,
            SpectralFunction::TraceExp,
        ];
        let xs: Vec<DoubleDouble> = [-0.3, -0.01, 0.0, 0.02, 0.25].iter().map(|&x| x.into()).collect();
        for f in fs {
            let series = spectral_sum_near_identity(&xs, f).to_f64();
            let direct: f64 = [-0.3, -0.01, 0.0, 0.02, 0.25]
                .iter()
                .map(|x| f.eval(1.0 + x).unwrap())
                .sum();
            assert!((series - direct).abs() < 1e-13, "{f:?}: {series} vs {direct}");
        }
    }

    #[test]
    fn conductance_of_k2() {
        assert!((exact_conductance(&Graph::complete(2)).unwrap() - 1.0).abs() < 1e-15);
    }
}
