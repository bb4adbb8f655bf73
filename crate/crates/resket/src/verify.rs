//! Property suites run by `resket verify`. Each returns the worst observed
//! ratio of measured quantity to allowed quantity; a suite passes when that
//! margin is at most 1.

use rand::Rng;
use resket_core::countsketch::{bucket_count_for, default_t, median_failure_bound};
use resket_core::hardness::{all_graphs, doubled_recovery, sdd_resistances_via_graph, signing_census, ResistanceEstimator};
use resket_core::oracle::{exact_conductance, half_normalized_pinv_apply, lazy_walk_dense, truncated_neumann};
use resket_core::{spectral_stats, CountSketch, DenseMatrix, DenseOracle, SddMatrix};
use serde::Serialize;

use crate::random;

pub const SUITES: &[&str] = &[
    "asymmetric-identity",
    "power-series-tail",
    "l1-bound",
    "solver",
    "countsketch",
    "two-path-signing",
    "triangle-signing",
    "embedding",
    "doubling",
    "cheeger",
];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: usize,
    pub margin: f64,
    pub detail: String,
}

#[derive(Default)]
struct Tally {
    checks: usize,
    margin: f64,
    worst: String,
}

impl Tally {
    fn record(&mut self, observed: f64, allowed: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        let ratio = if allowed > 0.0 {
            observed / allowed
        } else if observed > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        // NaN counts as a failure
        if !(ratio <= self.margin) {
            self.margin = if ratio.is_nan() { f64::INFINITY } else { ratio };
            self.worst = what();
        }
    }

    fn finish(self, suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            pass: self.margin <= 1.0,
            checks: self.checks,
            margin: self.margin,
            detail: self.worst,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

fn delta(n: usize, i: usize, j: usize) -> Vec<f64> {
    let mut d = vec![0.0; n];
    d[i] += 1.0;
    d[j] -= 1.0;
    d
}

/// `D^{1/2}(N̄/2)†D^{-1/2}x`.
fn scaled_half_pinv(m: &SddMatrix, x: &[f64]) -> resket_core::Result<Vec<f64>> {
    Ok(half_normalized_pinv_apply(m, x)?.iter().zip(m.diag()).map(|(v, d)| v * d.sqrt()).collect())
}

fn instance(seed: u64, n_max: usize) -> (rand_chacha::ChaCha8Rng, SddMatrix) {
    let mut r = random::rng(seed);
    let n = 2 + (seed as usize) % (n_max.max(2) - 1);
    let m = random::sdd(n, seed % 2 == 1, seed % 4 >= 2, &mut r);
    (r, m)
}

/// Normalized condition number from a dense eigensolve.
fn kappa_bar(m: &SddMatrix) -> resket_core::Result<f64> {
    let ev = m.normalized_dense().symmetric_eigenvalues()?;
    let top = *ev.last().unwrap();
    let lmin = ev.iter().copied().find(|l| *l > 1e-10 * top).unwrap_or(top);
    Ok(top / lmin)
}

pub fn asymmetric_identity(n_max: usize, seeds: u64) -> resket_core::Result<SuiteReport> {
    let mut t = Tally::default();
    for seed in 0..seeds {
        let (mut r, m) = instance(seed, n_max);
        let n = m.n();
        let x = random::unit_orthogonal(n, &m.kernel_basis(), &mut r);
        let truth = DenseOracle::from_sdd(&m)?.quadratic_pinv(&x);
        let dinv_x: Vec<f64> = x.iter().zip(m.diag()).map(|(v, d)| v / d).collect();
        let asym = 0.5 * dot(&dinv_x, &scaled_half_pinv(&m, &x)?);
        let y: Vec<f64> = x.iter().zip(m.diag()).map(|(v, d)| v / d.sqrt()).collect();
        let sym = dot(&y, &DenseOracle::new(&m.normalized_dense())?.pinv_apply(&y));
        let err = (asym - truth).abs().max((sym - truth).abs());
        t.record(err, 1e-10 * truth, || format!("seed {seed}, n {n}: forms {asym} {sym} vs {truth}"));
        let lower = 0.5 * dot(&dinv_x, &dinv_x);
        t.record(lower, truth * (1.0 + 1e-12), || format!("seed {seed}: lower bound {lower} vs {truth}"));
    }
    Ok(t.finish("asymmetric-identity"))
}

pub fn power_series_tail(n_max: usize, seeds: u64) -> resket_core::Result<SuiteReport> {
    let mut t = Tally::default();
    for seed in 0..seeds {
        let (mut r, m) = instance(seed, n_max.min(30));
        let n = m.n();
        let x = random::unit_orthogonal(n, &m.kernel_basis(), &mut r);
        let kappa = kappa_bar(&m)?;
        let target = half_normalized_pinv_apply(&m, &x)?;
        let scale = (n as f64).sqrt() * 2.0 * kappa / m.d_min().sqrt();
        let top = (5.0 * kappa).ceil() as usize;
        // partial sums built incrementally, checked against the library at the end
        let lazy = lazy_walk_dense(&m);
        let mut term: Vec<f64> = x.iter().zip(m.diag()).map(|(v, d)| v / d.sqrt()).collect();
        let mut sum = term.clone();
        for k in 1..=top {
            term = lazy.matvec(&term);
            for (s, v) in sum.iter_mut().zip(&term) {
                *s += v;
            }
            let gap: f64 = sum.iter().zip(&target).map(|(a, b)| (a - b).abs()).sum();
            let bound = scale * (-((k + 1) as f64) / (2.0 * kappa)).exp();
            // absolute floor for rounding in the dense reference
            t.record(gap, bound * (1.0 + 1e-9) + 1e-12, || format!("seed {seed}, k {k}: {gap} vs {bound}"));
        }
        let lib = truncated_neumann(&m, &x, top);
        let drift: f64 = lib.iter().zip(&sum).map(|(a, b)| (a - b).abs()).sum();
        t.record(drift, 1e-9 * (1.0 + norm1(&sum)), || format!("seed {seed}: library partial sum drift {drift}"));
    }
    Ok(t.finish("power-series-tail"))
}

pub fn l1_bound(n_max: usize, seeds: u64) -> resket_core::Result<SuiteReport> {
    let mut t = Tally::default();
    for seed in 0..seeds {
        let (mut r, m) = instance(seed, n_max);
        let n = m.n() as f64;
        let x = random::unit_orthogonal(m.n(), &m.kernel_basis(), &mut r);
        let kappa = kappa_bar(&m)?;
        let mm = (2.0 * kappa * ((n * m.d_max()).sqrt() * 2.0 * kappa / m.d_min().sqrt()).ln()).max(1.0);
        let lhs = norm1(&scaled_half_pinv(&m, &x)?);
        let rhs = mm * norm1(&x) + 1.0;
        t.record(lhs, rhs, || format!("seed {seed}: {lhs} vs {rhs}"));
    }
    Ok(t.finish("l1-bound"))
}

pub fn solver(n_max: usize, seeds: u64) -> resket_core::Result<SuiteReport> {
    let mut t = Tally::default();
    for seed in 0..seeds {
        let (mut r, m) = instance(seed, n_max);
        let b = random::unit_orthogonal(m.n(), &m.kernel_basis(), &mut r);
        let beta = 10f64.powf(r.random_range(-8.0..-0.3));
        let x = m.make_solver(beta)?.apply(&b)?;
        let oracle = DenseOracle::from_sdd(&m)?;
        let exact = oracle.pinv_apply(&b);
        let diff: Vec<f64> = x.iter().zip(&exact).map(|(a, e)| a - e).collect();
        let err = oracle.matrix().quadratic_form(&diff).max(0.0).sqrt();
        let scale = oracle.matrix().quadratic_form(&exact).sqrt();
        t.record(err, beta * scale, || format!("seed {seed}, beta {beta:e}: {err:e} vs {:e}", beta * scale));
    }
    Ok(t.finish("solver"))
}

pub fn countsketch(_n_max: usize, seeds: u64) -> resket_core::Result<SuiteReport> {
    let mut t = Tally::default();
    let (n, eps) = (200, 0.1);
    for pair in 0..10u64 {
        let mut r = random::rng(pair);
        let v: Vec<f64> = (0..n).map(|_| if r.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let w: Vec<f64> = v.iter().map(|x| if r.random::<f64>() < 0.2 { -x } else { *x }).collect();
        let truth = dot(&v, &w);
        let s = bucket_count_for(&v, &w, eps)?;
        let reps = default_t(n, 1.0);
        let mut fails = 0;
        for seed in 0..seeds {
            let cs = CountSketch::new(n, s, reps, seed)?;
            let est = cs.estimate(&cs.sketch(&v)?, &cs.sketch(&w)?)?;
            if (est - truth).abs() > eps * truth.abs() {
                fails += 1;
            }
        }
        let rate = fails as f64 / seeds as f64;
        let bound = median_failure_bound(3 * reps, 0.25);
        t.record(rate, bound, || format!("pair {pair}: rate {rate} vs {bound:e}"));
    }
    Ok(t.finish("countsketch"))
}

pub fn two_path_signing(n_max: usize, _seeds: u64) -> resket_core::Result<SuiteReport> {
    let mut t = Tally::default();
    for n in 2..=n_max.min(5) {
        for g in all_graphs(n)? {
            let c = signing_census(&g)?;
            for &(i, j, paths, hits) in &c.pairs {
                let (observed, allowed) = if paths == 0 {
                    (hits as f64, 0.0)
                } else {
                    (c.signings as f64 / 2.0, hits as f64)
                };
                t.record(observed, allowed, || format!("{:?}, pair ({i},{j}): {hits}/{}", g.edges(), c.signings));
            }
        }
    }
    Ok(t.finish("two-path-signing"))
}

pub fn triangle_signing(n_max: usize, _seeds: u64) -> resket_core::Result<SuiteReport> {
    let mut t = Tally::default();
    for n in 3..=n_max.min(5) {
        for g in all_graphs(n)? {
            let c = signing_census(&g)?;
            let (observed, allowed) = if g.has_triangle() {
                (c.signings as f64 / 4.0, c.trace_nonzero as f64)
            } else {
                (c.trace_nonzero as f64, 0.0)
            };
            t.record(observed, allowed, || format!("{:?}: {}/{}", g.edges(), c.trace_nonzero, c.signings));
        }
    }
    Ok(t.finish("triangle-signing"))
}

pub fn embedding(n_max: usize, seeds: u64) -> resket_core::Result<SuiteReport> {
    let mut t = Tally::default();
    for seed in 0..seeds {
        let mut r = random::rng(seed);
        let n = 2 + (seed as usize) % (n_max.clamp(2, 15) - 1);
        let signed = seed % 2 == 1;
        let q = random::admissible_q(n, signed, r.random_range(0.05..1.0 / 3.0), &mut r);
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let got = sdd_resistances_via_graph(&q, &pairs, &ResistanceEstimator::ExactOracle)?;
        let direct = DenseOracle::new(&DenseMatrix::identity(n).sub(&q))?;
        for (&(i, j), v) in pairs.iter().zip(&got) {
            let want = direct.quadratic_pinv(&delta(n, i, j));
            t.record((v - want).abs(), 1e-8 * want, || format!("seed {seed}, ({i},{j}): {v} vs {want}"));
        }
    }
    Ok(t.finish("embedding"))
}

pub fn doubling(n_max: usize, seeds: u64) -> resket_core::Result<SuiteReport> {
    let mut t = Tally::default();
    for seed in 0..seeds {
        let mut r = random::rng(seed);
        let n = 2 + (seed as usize) % (n_max.clamp(2, 12) - 1);
        let mut sym = || {
            let a = DenseMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
            a.add(&a.transpose())
        };
        let (x, y) = (sym(), sym());
        let z = DenseMatrix::from_fn(2 * n, 2 * n, |a, b| {
            if (a < n) == (b < n) {
                x[(a % n, b % n)]
            } else {
                y[(a % n, b % n)]
            }
        });
        let diff = x.sub(&y);
        for i in 0..n {
            for j in i + 1..n {
                let rz = |a: usize, b: usize| Ok(z.quadratic_form(&delta(2 * n, a, b)));
                let got = doubled_recovery(n, i, j, rz)?;
                let want = diff.quadratic_form(&delta(n, i, j));
                t.record((got - want).abs(), 1e-12 * (1.0 + z.max_abs()), || format!("seed {seed}, ({i},{j})"));
            }
        }
    }
    Ok(t.finish("doubling"))
}

pub fn cheeger(n_max: usize, seeds: u64) -> resket_core::Result<SuiteReport> {
    let mut t = Tally::default();
    for seed in 0..seeds {
        let mut r = random::rng(seed);
        let n = 2 + (seed as usize) % (n_max.clamp(2, 14) - 1);
        let g = random::connected_graph(n, 0.3, seed % 2 == 1, &mut r);
        let stats = spectral_stats(&g, 1e-10)?;
        let phi = exact_conductance(&g)?;
        t.record(stats.cheeger_lower, phi * (1.0 + 1e-9), || format!("seed {seed}: lower {} vs {phi}", stats.cheeger_lower));
        t.record(phi, stats.cheeger_upper * (1.0 + 1e-9), || format!("seed {seed}: {phi} vs upper {}", stats.cheeger_upper));
    }
    Ok(t.finish("cheeger"))
}

/// Runs one suite by name; `None` for an unknown name.
pub fn run_suite(name: &str, n_max: usize, seeds: u64) -> Option<resket_core::Result<SuiteReport>> {
    let f: fn(usize, u64) -> resket_core::Result<SuiteReport> = match name {
        "asymmetric-identity" => asymmetric_identity,
        "power-series-tail" => power_series_tail,
        "l1-bound" => l1_bound,
        "solver" => solver,
        "countsketch" => countsketch,
        "two-path-signing" => two_path_signing,
        "triangle-signing" => triangle_signing,
        "embedding" => embedding,
        "doubling" => doubling,
        "cheeger" => cheeger,
        _ => return None,
    };
    Some(f(n_max, seeds))
}
