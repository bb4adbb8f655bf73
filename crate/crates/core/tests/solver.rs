mod common;

use common::{delta, dot, quadratic_pinv, random_orthogonal, random_sdd};
use proptest::prelude::*;
use resket_core::{DenseMatrix, Error, Graph, KernelKind, SddMatrix};

fn m_norm(m: &SddMatrix, x: &[f64]) -> f64 {
    dot(x, &m.apply(x)).sqrt()
}

#[test]
fn identity_and_single_edge() {
    let id = SddMatrix::identity(3);
    let h = id.make_solver(1e-6).unwrap();
    assert_eq!(h.apply(&[1.0, -2.0, 0.5]).unwrap(), vec![1.0, -2.0, 0.5]);

    let l = Graph::complete(2).laplacian().unwrap();
    let x = l.make_solver(1e-10).unwrap().apply(&[1.0, -1.0]).unwrap();
    assert!((x[0] - 0.5).abs() < 1e-10 && (x[1] + 0.5).abs() < 1e-10);
}

#[test]
fn k3_resistance_and_zero() {
    let l = Graph::complete(3).laplacian().unwrap();
    let h = l.make_solver(1e-8).unwrap();
    let b = delta(3, 0, 1);
    let x = h.apply(&b).unwrap();
    assert!((dot(&b, &x) - 2.0 / 3.0).abs() < 1e-8);
    assert_eq!(h.apply(&[0.0; 3]).unwrap(), vec![0.0; 3]);
}

#[test]
fn homogeneous_in_rhs() {
    let mut r = common::rng(3);
    let m = random_sdd(30, false, &mut r);
    let h = m.make_solver(1e-6).unwrap();
    let b = random_orthogonal(30, &m.kernel_basis(), &mut r);
    let x = h.apply(&b).unwrap();
    let b4: Vec<f64> = b.iter().map(|v| 4.0 * v).collect();
    let x4 = h.apply(&b4).unwrap();
    for (a, c) in x.iter().zip(&x4) {
        assert!((4.0 * a - c).abs() <= 1e-14 * c.abs().max(1.0));
    }
}

#[test]
fn kernel_violation_rejected() {
    let l = Graph::path(4).laplacian().unwrap();
    assert_eq!(l.kernel(), &KernelKind::Ones);
    let h = l.make_solver(1e-6).unwrap();
    assert!(matches!(h.apply(&[1.0, 0.0, 0.0, 0.0]), Err(Error::KernelViolation { .. })));
    let x = h.apply_projected(&[1.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(x.iter().sum::<f64>().abs() < 1e-12);
}

#[test]
fn signed_kernel_detected() {
    // M = [[1, 1], [1, 1]] has kernel (1, −1)/√2
    let m = SddMatrix::new(vec![1.0, 1.0], [(0, 1, -1.0)]).unwrap();
    assert_eq!(m.kernel_dim(), 1);
    let k = &m.kernel_basis()[0];
    assert!((k[0] + k[1]).abs() < 1e-15);
    let x = m.make_solver(1e-10).unwrap().apply(&[1.0, 1.0]).unwrap();
    assert!((x[0] - 0.5).abs() < 1e-10 && (x[1] - 0.5).abs() < 1e-10);
}

#[test]
fn lazy_walk_examples() {
    let id = SddMatrix::identity(3);
    let x = [1.0, -3.0, 2.0];
    assert_eq!(id.lazy_walk_power_apply(&x, 0), x.to_vec());
    let y = id.lazy_walk_power_apply(&x, 4);
    for (a, b) in y.iter().zip(&x) {
        assert_eq!(*a, b / 16.0);
    }

    let l = Graph::complete(3).laplacian().unwrap();
    let b = delta(3, 0, 1);
    let walk = resket_core::oracle::lazy_walk_dense(&l);
    let mut want: Vec<f64> = b.iter().map(|v| v / 2f64.sqrt()).collect();
    for _ in 0..3 {
        want = walk.matvec(&want);
    }
    for (a, w) in l.lazy_walk_power_apply(&b, 3).iter().zip(&want) {
        assert!((a - w).abs() < 1e-12);
    }
}

#[test]
fn random_ten_by_ten() {
    let mut r = common::rng(10);
    for _ in 0..20 {
        let m = random_sdd(10, false, &mut r);
        let beta = 1e-3;
        let b = random_orthogonal(10, &m.kernel_basis(), &mut r);
        let x = m.make_solver(beta).unwrap().apply(&b).unwrap();
        let exact = common::laplacian_pinv_apply(&m.to_dense(), &b);
        let err: Vec<f64> = x.iter().zip(&exact).map(|(a, e)| a - e).collect();
        assert!(m_norm(&m, &err) <= beta * m_norm(&m, &exact));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_contract(n in 2usize..50, slack in any::<bool>(), beta_exp in 1i32..9, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let m = random_sdd(n, slack, &mut r);
        let beta = 10f64.powi(-beta_exp);
        let b = random_orthogonal(n, &m.kernel_basis(), &mut r);
        let (x, rep) = m.make_solver(beta).unwrap().apply_with_report(&b).unwrap();
        prop_assert!(rep.converged);
        let d = m.to_dense();
        let exact = if slack { common::gauss_solve(&d, &b) } else { common::laplacian_pinv_apply(&d, &b) };
        let err: Vec<f64> = x.iter().zip(&exact).map(|(a, e)| a - e).collect();
        prop_assert!(m_norm(&m, &err) <= beta * m_norm(&m, &exact), "{} vs {}", m_norm(&m, &err), m_norm(&m, &exact));
        prop_assert!(rep.error_bound <= beta);
    }

    #[test]
    fn normalized_spectrum_in_box(n in 2usize..30, slack in any::<bool>(), seed in any::<u64>()) {
        let m = random_sdd(n, slack, &mut common::rng(seed));
        let ev = m.normalized_dense().symmetric_eigenvalues().unwrap();
        prop_assert!(ev[0] >= -1e-12 && ev[n - 1] <= 2.0 + 1e-12);
    }

    #[test]
    fn pinv_quadratic_agrees(n in 2usize..25, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let m = random_sdd(n, false, &mut r);
        let x = random_orthogonal(n, &m.kernel_basis(), &mut r);
        let oracle = resket_core::DenseOracle::from_sdd(&m).unwrap();
        let a = oracle.quadratic_pinv(&x);
        let b = quadratic_pinv(&m, &x);
        prop_assert!((a - b).abs() <= 1e-10 * b);
        let back = DenseMatrix::matvec(&m.to_dense(), &oracle.pinv_apply(&x));
        for (u, v) in back.iter().zip(&x) {
            prop_assert!((u - v).abs() <= 1e-9);
        }
    }
}
