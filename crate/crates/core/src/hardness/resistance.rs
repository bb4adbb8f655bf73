//! Triangle detection from SDD effective-resistance estimates of
//! `I − (α/n)Ā_H`.

use alloc::vec::Vec;

#[cfg(feature = "std")]
use rayon::prelude::*;

use super::embedding::{doubling_transform, expander_embedding, ResistanceEstimator};
use super::signing::random_signing;
use super::tripartite::sample_tripartite;
use crate::error::{Error, Result};
use crate::float::abs;
use crate::graph::Graph;
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionParams {
    /// Scale of the signed adjacency, in `(0, 1/3)`.
    pub alpha: f64,
    /// Resistance accuracy is `c_red / n²`.
    pub c_red: f64,
    pub estimator: ResistanceEstimator,
    /// Push exact-oracle resistances by `±c_red/n²` (relative) in the
    /// direction that moves each `P_ij` toward the decision threshold.
    pub perturb: bool,
}

impl Default for ReductionParams {
    fn default() -> Self {
        Self {
            alpha: 0.3,
            c_red: 0.01,
            estimator: ResistanceEstimator::ExactOracle,
            perturb: true,
        }
    }
}

impl ReductionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0 / 3.0) {
            return Err(Error::param("alpha", "must lie in (0, 1/3)"));
        }
        if !(self.c_red >= 0.0 && self.c_red.is_finite()) {
            return Err(Error::param("c_red", "must be finite and nonnegative"));
        }
        if let ResistanceEstimator::Sketch { eps, config, .. } = &self.estimator {
            crate::sketch::check_eps(*eps)?;
            config.validate()?;
        }
        Ok(())
    }

    pub fn eps_target(&self, n: usize) -> f64 {
        self.c_red / (n as f64 * n as f64)
    }
}

/// Bound `x⁴/(1 − x)` with `x = α·ρ/n` on the entries of `N − Ñ` that the
/// estimate reads (odd powers vanish there since `H` is bipartite).
pub fn tail_bound(alpha: f64, n: usize, rho: f64) -> f64 {
    let x = alpha * rho / n as f64;
    if x >= 1.0 {
        return f64::INFINITY;
    }
    x * x * x * x / (1.0 - x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceTrial {
    pub seed: u64,
    pub part_sizes: [usize; 3],
    pub rho: f64,
    /// Truncation error bound on each `P_ij`: `2(n²/α²)·tail_bound`.
    pub p_tail_bound: f64,
    pub pairs_checked: usize,
    pub max_abs_p: f64,
    /// `(i, j, P_ij)` for the largest `|P_ij| ≥ 1/2`.
    pub witness: Option<(usize, usize, f64)>,
    pub triangle: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceReport {
    pub triangle: bool,
    pub trials: Vec<ResistanceTrial>,
}

fn p_value(n2a2: f64, n_ii: f64, n_jj: f64, r: [f64; 4]) -> f64 {
    let r_tilde = 0.5 * (r[0] + r[1]) - r[2] + r[3];
    n2a2 * (n_ii + n_jj - r_tilde) / 2.0
}

pub fn run_resistance_trial(g: &Graph, params: &ReductionParams, seed: u64) -> Result<ResistanceTrial> {
    params.validate()?;
    let n = g.n();
    let inst = sample_tripartite(g, derive_seed(seed, 0))?;
    let sa = random_signing(&inst.h, derive_seed(seed, 1))?;
    let rho = sa.spectral_radius()?;
    let alpha = params.alpha;
    let nf = n as f64;
    let n2a2 = nf * nf / (alpha * alpha);
    let mut trial = ResistanceTrial {
        seed,
        part_sizes: inst.part_sizes(),
        rho,
        p_tail_bound: 2.0 * n2a2 * tail_bound(alpha, n, rho),
        pairs_checked: inst.e12.len(),
        max_abs_p: 0.0,
        witness: None,
        triangle: false,
    };
    if inst.e12.is_empty() {
        return Ok(trial);
    }

    let q = sa.dense().scaled(alpha / nf);
    let embedded = expander_embedding(&doubling_transform(&q)?)?;
    let est = params.estimator.prepare(&embedded)?;
    let perturb = params.perturb && matches!(params.estimator, ResistanceEstimator::ExactOracle);
    let eps = params.eps_target(n);
    let n_tilde = |v: usize| 1.0 + inst.h.degree(v) / n2a2;

    for &(i, j) in &inst.e12 {
        let r = [
            est.resistance(i, n + i)?,
            est.resistance(j, n + j)?,
            est.resistance(i, n + j)?,
            est.resistance(i, j)?,
        ];
        let (nii, njj) = (n_tilde(i), n_tilde(j));
        let mut p = p_value(n2a2, nii, njj, r);
        if perturb {
            let push = |s: f64| {
                let f = [1.0 + s * eps, 1.0 + s * eps, 1.0 - s * eps, 1.0 + s * eps];
                p_value(n2a2, nii, njj, [r[0] * f[0], r[1] * f[1], r[2] * f[2], r[3] * f[3]])
            };
            let (up, down) = (push(1.0), push(-1.0));
            // away from 0 when below the threshold, toward 0 otherwise
            let pick_larger = abs(p) < 0.5;
            p = if (abs(up) > abs(down)) == pick_larger { up } else { down };
        }
        let a = abs(p);
        if a > trial.max_abs_p {
            trial.max_abs_p = a;
            if a >= 0.5 {
                trial.witness = Some((i, j, p));
            }
        }
    }
    trial.triangle = trial.witness.is_some();
    Ok(trial)
}

/// OR over `trials` independent trials seeded from `master_seed`.
pub fn detect_triangle_via_resistance(
    g: &Graph,
    params: &ReductionParams,
    trials: usize,
    master_seed: u64,
) -> Result<ResistanceReport> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    if !g.is_unweighted() {
        return Err(Error::WeightedInput);
    }
    let run = |t: usize| run_resistance_trial(g, params, derive_seed(master_seed, t as u64));
    #[cfg(feature = "std")]
    let results: Vec<Result<ResistanceTrial>> = (0..trials).into_par_iter().map(run).collect();
    #[cfg(not(feature = "std"))]
    let results: Vec<Result<ResistanceTrial>> = (0..trials).map(run).collect();
    let trials = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ResistanceReport {
        triangle: trials.iter().any(|t| t.triangle),
        trials,
    })
}
