//! Triangle detection from a multiplicatively perturbed spectral sum of
//! `B̄ = I − δĀ`.

use alloc::vec::Vec;

use super::signing::random_signing;
use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::float::{abs, ln, sqrt};
use crate::graph::Graph;
use crate::oracle::{spectral_sum_near_identity, SpectralFunction};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSumParams {
    pub f: SpectralFunction,
    pub n: usize,
    pub h: f64,
    pub delta: f64,
    pub eps1: f64,
    pub alpha_const: f64,
}

impl SpectralSumParams {
    pub fn c(&self, k: u32) -> DoubleDouble {
        self.f.taylor_coefficient(k)
    }
}

fn growth(f: SpectralFunction) -> f64 {
    match f {
        SpectralFunction::SchattenP(p) if p == 3.0 => 0.0,
        SpectralFunction::SchattenP(p) => p,
        SpectralFunction::SvdEntropy | SpectralFunction::LogDet | SpectralFunction::TraceExp => 1.0,
    }
}

/// `δ = min(1/(√n·ln(αn)), 1/(10n³h·ln(αn)))` and
/// `ε₁ = min(1, |c₃δ³/(c₀n)|, |c₃δ/(c₂n²)|)`, skipping terms with `h = 0`
/// or a zero coefficient.
pub fn spectral_sum_params(f: SpectralFunction, n: usize, alpha_const: f64) -> Result<SpectralSumParams> {
    if let SpectralFunction::SchattenP(p) = f {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::param("f", "Schatten exponent must be positive"));
        }
    }
    if n < 2 {
        return Err(Error::param("n", "need at least two vertices"));
    }
    if !(alpha_const > 1.0 && alpha_const.is_finite()) {
        return Err(Error::param("alpha_const", "must be finite and greater than 1"));
    }
    let nf = n as f64;
    let log = ln(alpha_const * nf);
    let h = growth(f);
    let mut delta = 1.0 / (sqrt(nf) * log);
    if h > 0.0 {
        delta = delta.min(1.0 / (10.0 * nf * nf * nf * h * log));
    }
    let c0 = f.taylor_coefficient(0).to_f64();
    let c2 = f.taylor_coefficient(2).to_f64();
    let c3 = f.taylor_coefficient(3).to_f64();
    if c3 == 0.0 {
        return Err(Error::param("f", "cubic Taylor coefficient vanishes"));
    }
    let mut eps1: f64 = 1.0;
    if c0 != 0.0 {
        eps1 = eps1.min(abs(c3 * delta * delta * delta / (c0 * nf)));
    }
    if c2 != 0.0 {
        eps1 = eps1.min(abs(c3 * delta / (c2 * nf * nf)));
    }
    Ok(SpectralSumParams {
        f,
        n,
        h,
        delta,
        eps1,
        alpha_const,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTrial {
    pub seed: u64,
    pub rho: f64,
    pub trace_cube: i64,
    /// Unperturbed `S_f(B̄)`.
    pub exact_sum: f64,
    /// `(X' − c₀n − c₂δ²·tr Ā²)/(c₃δ³)` from the perturbed sum `X'`.
    pub recovered: f64,
    pub triangle: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub params: SpectralSumParams,
    pub triangle: bool,
    pub trials: Vec<SpectralTrial>,
}

pub fn run_spectral_trial(g: &Graph, params: &SpectralSumParams, seed: u64) -> Result<SpectralTrial> {
    if g.n() != params.n {
        return Err(Error::DimensionMismatch { expected: params.n, actual: g.n() });
    }
    let sa = random_signing(g, seed)?;
    let lambdas = sa.eigenvalues()?;
    let rho = lambdas.iter().fold(0.0_f64, |r, l| r.max(abs(*l)));
    let delta = DoubleDouble::from_f64(params.delta);
    if params.delta * rho >= 1.0 {
        return Err(Error::SpectralRadius {
            rho: params.delta * rho,
            limit: 1.0,
        });
    }
    let shifts: Vec<DoubleDouble> = lambdas.iter().map(|&l| -(delta * l)).collect();
    let x = spectral_sum_near_identity(&shifts, params.f);

    let nn = DoubleDouble::from_f64(params.n as f64);
    let trace_sq = DoubleDouble::from_f64(2.0 * g.m() as f64);
    let base = params.c(0) * nn + params.c(2) * delta * delta * trace_sq;
    let denom = params.c(3) * delta * delta * delta;
    let recover = |xp: DoubleDouble| ((xp - base) / denom).to_f64();

    let factor = params.eps1 / 9.0;
    let up = recover(x * DoubleDouble::from_f64(1.0 + factor));
    let down = recover(x * DoubleDouble::from_f64(1.0 - factor));
    let t0 = recover(x);
    // worst case: toward the threshold from whichever side we start
    let pick_larger = abs(t0) < 0.5;
    let recovered = if (abs(up) > abs(down)) == pick_larger { up } else { down };

    Ok(SpectralTrial {
        seed,
        rho,
        trace_cube: sa.trace_cube(),
        exact_sum: x.to_f64(),
        recovered,
        triangle: abs(recovered) >= 0.5,
    })
}

pub fn detect_triangle_via_spectral_sum(
    g: &Graph,
    f: SpectralFunction,
    alpha_const: f64,
    trials: usize,
    master_seed: u64,
) -> Result<SpectralReport> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let params = spectral_sum_params(f, g.n(), alpha_const)?;
    let trials = (0..trials)
        .map(|t| run_spectral_trial(g, &params, derive_seed(master_seed, t as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralReport {
        params,
        triangle: trials.iter().any(|t| t.triangle),
        trials,
    })
}
