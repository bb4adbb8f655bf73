mod common;

use proptest::prelude::*;
use rand::Rng;
use resket_core::countsketch::{bucket_count_for, median_failure_bound};
use resket_core::CountSketch;

#[test]
fn zero_and_basis_vectors() {
    let cs = CountSketch::new(50, 16, 3, 9).unwrap();
    let zero = cs.sketch(&[0.0; 50]).unwrap();
    assert!(zero.values().iter().all(|v| *v == 0.0));
    let mut e = vec![0.0; 50];
    e[7] = 1.0;
    let se = cs.sketch(&e).unwrap();
    for b in 0..cs.blocks() {
        let nz: Vec<f64> = se.block(b).iter().copied().filter(|v| *v != 0.0).collect();
        assert_eq!(nz.len(), 1);
        assert_eq!(nz[0].abs(), 1.0);
    }
    assert_eq!(cs.estimate(&se, &se).unwrap(), 1.0);
    assert!(cs.block_estimates(&se, &se).unwrap().iter().all(|v| *v == 1.0));
    assert_eq!(cs.estimate(&zero, &se).unwrap(), 0.0);
}

#[test]
fn unbiased_per_block() {
    let mut r = common::rng(1);
    let n = 40;
    let v: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    let w: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    let truth = common::dot(&v, &w);
    let s = 8;
    let seeds = 10_000;
    let mut vals = Vec::with_capacity(seeds);
    for seed in 0..seeds as u64 {
        let cs = CountSketch::new(n, s, 1, seed).unwrap();
        let est = cs.block_estimates(&cs.sketch(&v).unwrap(), &cs.sketch(&w).unwrap()).unwrap();
        vals.push(est[0]);
    }
    let mean = vals.iter().sum::<f64>() / seeds as f64;
    let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (seeds as f64 - 1.0);
    let se = (var / seeds as f64).sqrt();
    assert!((mean - truth).abs() <= 3.0 * se, "mean {mean} truth {truth} se {se}");

    let l1 = common::norm1(&v) * common::norm1(&w);
    let l2 = common::dot(&v, &v).sqrt() * common::dot(&w, &w).sqrt();
    let bound = (3.0 * l1 * l1 / (s * s) as f64).min(2.0 * l2 * l2 / s as f64);
    assert!(var <= 1.5 * bound, "var {var} bound {bound}");
}

#[test]
fn targeted_failure_rate() {
    // ±1 vectors in R^200 at ε = 0.1, s from the ℓ₂ branch
    let n = 200;
    let eps = 0.1;
    let mut r = common::rng(2);
    let v: Vec<f64> = (0..n).map(|_| if r.random::<bool>() { 1.0 } else { -1.0 }).collect();
    let w: Vec<f64> = v.iter().map(|x| if r.random::<f64>() < 0.2 { -x } else { *x }).collect();
    let truth = common::dot(&v, &w);
    let s = bucket_count_for(&v, &w, eps).unwrap();
    let t = resket_core::countsketch::default_t(n, 1.0);
    let bound = median_failure_bound(3 * t, 0.25);
    let mut fails = 0;
    for seed in 0..1000 {
        let cs = CountSketch::new(n, s, t, seed).unwrap();
        let est = cs.estimate(&cs.sketch(&v).unwrap(), &cs.sketch(&w).unwrap()).unwrap();
        if (est - truth).abs() > eps * truth.abs() {
            fails += 1;
        }
    }
    assert!(fails as f64 / 1000.0 <= bound, "{fails} vs {bound}");
}

#[test]
fn failure_bound_values() {
    assert!((median_failure_bound(1, 0.25) - 0.25).abs() < 1e-15);
    // P[Bin(3, 1/4) ≥ 2] = 3·(1/16)·(3/4) + 1/64 = 10/64
    assert!((median_failure_bound(3, 0.25) - 10.0 / 64.0).abs() < 1e-15);
    assert!(median_failure_bound(39, 0.25) < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sparse_path_bit_identical(
        entries in proptest::collection::btree_map(0usize..60, -5.0f64..5.0, 1..4),
        seed in any::<u64>(),
        wseed in any::<u64>(),
    ) {
        let n = 60;
        let cs = CountSketch::new(n, 12, 2, seed).unwrap();
        let mut r = common::rng(wseed);
        let w: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let sw = cs.sketch(&w).unwrap();
        let sparse: Vec<(usize, f64)> = entries.into_iter().collect();
        let mut dense = vec![0.0; n];
        for &(j, x) in &sparse {
            dense[j] = x;
        }
        let a = cs.estimate_from_sparse(&sparse, &sw).unwrap();
        let b = cs.estimate(&cs.sketch(&dense).unwrap(), &sw).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn deterministic_and_linear(seed in any::<u64>(), c in -4.0f64..4.0) {
        let n = 30;
        let mut r = common::rng(seed ^ 1);
        let v: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let a = CountSketch::new(n, 7, 2, seed).unwrap();
        let b = CountSketch::new(n, 7, 2, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let sv = a.sketch(&v).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        let ss = a.sketch(&scaled).unwrap();
        for (x, y) in sv.values().iter().zip(ss.values()) {
            prop_assert!((c * x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }
}
