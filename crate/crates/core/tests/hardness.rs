mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use resket_core::hardness::*;
use resket_core::{derive_seed, gen_expander, DenseMatrix, DenseOracle, Graph, SketchConfig, SpectralFunction};

/// Symmetric zero-diagonal `q` with max absolute row sum `scale`.
fn random_admissible(n: usize, signed: bool, scale: f64, r: &mut ChaCha8Rng) -> DenseMatrix {
    let mut q = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if r.random::<f64>() < 0.6 {
                let mut v = r.random_range(0.0..1.0);
                if signed && r.random::<bool>() {
                    v = -v;
                }
                q[(i, j)] = v;
                q[(j, i)] = v;
            }
        }
    }
    let top = (0..n).map(|i| q.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    if top > 0.0 {
        q = q.scaled(scale / top);
    }
    q
}

fn direct_sdd_resistance(q: &DenseMatrix, i: usize, j: usize) -> f64 {
    let n = q.rows();
    let m = DenseMatrix::identity(n).sub(q);
    let d = common::delta(n, i, j);
    common::dot(&d, &common::gauss_solve(&m, &d))
}

fn random_triangle_free(n: usize, p: f64, r: &mut ChaCha8Rng) -> Graph {
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.random::<f64>() < p {
                edges.insert((u, v));
            }
        }
    }
    loop {
        let g = Graph::unweighted(n, edges.iter().copied()).unwrap();
        let hit = g.edges().iter().find(|&&(u, v, _)| g.neighbor_ids(u).iter().any(|w| g.has_edge(*w, v)));
        match hit {
            Some(&(u, v, _)) => {
                edges.remove(&(u, v));
            }
            None => return g,
        }
    }
}

#[test]
fn signing_spectral_radius_monte_carlo() {
    let g = gen_expander(60, 8, 3).unwrap();
    let limit = 8f64.sqrt() * (2.0f64 * 60.0).ln();
    let worst = (0..100)
        .map(|s| random_signing(&g, s).unwrap().spectral_radius().unwrap())
        .fold(0.0, f64::max);
    assert!(worst <= limit, "{worst} {limit}");
}

#[test]
fn tripartite_triangle_frequency() {
    let g = Graph::complete(3);
    // exact probability by enumeration of the 27 labellings
    let mut distinct = 0;
    for a in 0..3u8 {
        for b in 0..3u8 {
            for c in 0..3u8 {
                if a != b && b != c && a != c {
                    distinct += 1;
                }
            }
        }
    }
    let p = distinct as f64 / 27.0;
    assert_eq!(distinct, 6);
    let trials = 10_000;
    let hits = (0..trials)
        .filter(|&s| {
            let inst = sample_tripartite(&g, s).unwrap();
            inst.part_sizes() == [1, 1, 1]
        })
        .count();
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    assert!((hits as f64 / trials as f64 - p).abs() <= 3.0 * sigma);

    let c5 = Graph::cycle(5);
    for s in 0..200 {
        assert!(!sample_tripartite(&c5, s).unwrap().h.has_triangle());
    }
}

#[test]
fn exhaustive_two_paths_and_traces() {
    for n in 1..=5 {
        for g in all_graphs(n).unwrap() {
            let c = signing_census(&g).unwrap();
            for &(_, _, paths, hits) in &c.pairs {
                if paths == 0 {
                    assert_eq!(hits, 0);
                } else {
                    assert!(2 * hits >= c.signings, "{g:?}");
                }
            }
            if g.has_triangle() {
                assert!(4 * c.trace_nonzero >= c.signings, "{g:?}");
            } else {
                assert_eq!(c.trace_nonzero, 0);
            }
        }
    }
}

#[test]
fn doubling_examples() {
    let mut r = common::rng(1);
    let q = random_admissible(4, false, 0.3, &mut r);
    let d = doubling_transform(&q).unwrap();
    for a in 0..8 {
        for b in 0..8 {
            let same = (a < 4) == (b < 4);
            assert_eq!(d[(a, b)], if same { q[(a % 4, b % 4)] } else { 0.0 });
        }
    }

    let neg = DenseMatrix::from_row_major(2, 2, vec![0.0, -0.2, -0.2, 0.0]).unwrap();
    let dn = doubling_transform(&neg).unwrap();
    assert_eq!(dn[(0, 1)], 0.0);
    assert_eq!(dn[(0, 3)], 0.2);
    assert_eq!(dn[(1, 2)], 0.2);
    let z = DenseOracle::new(&DenseMatrix::identity(4).sub(&dn)).unwrap();
    let rz = |a: usize, b: usize| Ok(z.quadratic_pinv(&common::delta(4, a, b)));
    let rec = doubled_recovery(2, 0, 1, rz).unwrap();
    assert!((rec - direct_sdd_resistance(&neg, 0, 1)).abs() < 1e-12);
}

#[test]
fn block_symmetric_identity() {
    let mut r = common::rng(2);
    let n = 5;
    for _ in 0..20 {
        let x = DenseMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
        let y = DenseMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
        let (x, y) = (x.add(&x.transpose()), y.add(&y.transpose()));
        let z = DenseMatrix::from_fn(2 * n, 2 * n, |a, b| {
            if (a < n) == (b < n) { x[(a % n, b % n)] } else { y[(a % n, b % n)] }
        });
        let rz = |a: usize, b: usize| {
            let d = common::delta(2 * n, a, b);
            Ok(common::dot(&d, &z.matvec(&d)))
        };
        let diff = x.sub(&y);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 0.0 } else {
                    let d = common::delta(n, i, j);
                    common::dot(&d, &diff.matvec(&d))
                };
                let got = doubled_recovery(n, i, j, rz).unwrap();
                assert!((got - want).abs() < 1e-12, "{got} {want}");
            }
        }
    }
}

#[test]
fn embedding_examples() {
    let zero = DenseMatrix::zeros(3, 3);
    let star = expander_embedding(&zero).unwrap();
    assert_eq!(star.n(), 4);
    assert!(star.edges().iter().all(|&(_, v, w)| v == 3 && w == 1.0));
    let all = sdd_resistances_via_graph(&zero, &[(0, 1), (0, 2), (1, 2)], &ResistanceEstimator::ExactOracle).unwrap();
    assert!(all.iter().all(|v| (v - 2.0).abs() < 1e-12));

    let q = DenseMatrix::from_row_major(2, 2, vec![0.0, 0.2, 0.2, 0.0]).unwrap();
    let g = expander_embedding(&q).unwrap();
    let r = DenseOracle::from_graph(&g).unwrap().resistance(0, 1);
    assert!((r - direct_sdd_resistance(&q, 0, 1)).abs() < 1e-12);
}

#[test]
fn embedding_identities_random() {
    let mut r = common::rng(3);
    for k in 0..100 {
        let n = 2 + k % 14;
        let signed = k % 2 == 1;
        let q = random_admissible(n, signed, r.random_range(0.05..1.0 / 3.0), &mut r);
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let got = sdd_resistances_via_graph(&q, &pairs, &ResistanceEstimator::ExactOracle).unwrap();
        for (&(i, j), v) in pairs.iter().zip(&got) {
            let want = direct_sdd_resistance(&q, i, j);
            assert!((v - want).abs() <= 1e-8 * want, "n={n} {v} {want}");
        }
        let g = expander_embedding(&doubling_transform(&q).unwrap()).unwrap();
        assert!(embedding_lambda2(&g).unwrap() >= 2.0 / 3.0 - 1e-12);
        if !signed {
            assert!(embedding_lambda2(&expander_embedding(&q).unwrap()).unwrap() >= 2.0 / 3.0 - 1e-12);
        }
    }
}

#[test]
fn sketch_estimator_on_nonnegative_q() {
    let mut r = common::rng(4);
    let n = 30;
    let q = random_admissible(n, false, 0.3, &mut r);
    let est = ResistanceEstimator::Sketch { eps: 0.1, config: SketchConfig::default(), seed: 5 };
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let got = sdd_resistances_via_graph(&q, &pairs, &est).unwrap();
    for (&(i, j), v) in pairs.iter().zip(&got) {
        let want = direct_sdd_resistance(&q, i, j);
        assert!((v - want).abs() <= 0.1 * want, "({i},{j}) {v} {want}");
    }
}

#[test]
fn resistance_detection_examples() {
    let params = ReductionParams::default();
    let c5 = detect_triangle_via_resistance(&Graph::cycle(5), &params, 50, 9).unwrap();
    assert!(!c5.triangle);
    assert!(detect_triangle_via_resistance(&Graph::complete(3), &params, 40, 9).unwrap().triangle);
    assert!(!detect_triangle_via_resistance(&Graph::petersen(), &params, 30, 1).unwrap().triangle);
}

#[test]
fn triangle_plus_path_success_rate() {
    let mut edges = vec![(0, 1), (1, 2), (0, 2)];
    edges.extend((2..11).map(|v| (v, v + 1)));
    let g = Graph::unweighted(12, edges).unwrap();

    // Enumerate labels of the triangle and all signings of the resulting H.
    // Other vertices are labelled 0; path edges have no common neighbours,
    // so they can never supply a witness.
    let mut p = 0.0;
    for code in 0..27u32 {
        let mut labels = vec![0u8; 12];
        labels[0] = (code % 3) as u8;
        labels[1] = (code / 3 % 3) as u8;
        labels[2] = (code / 9) as u8;
        let inst = TripartiteInstance::from_labels(&g, labels).unwrap();
        let m = inst.h.m();
        let mut ok = 0u64;
        for mask in 0..1u64 << m {
            let sa = SignedAdjacency::from_mask(&inst.h, mask).unwrap();
            if inst.e12.iter().any(|&(i, j)| sa.two_path(i, j).unwrap() != 0) {
                ok += 1;
            }
        }
        p += ok as f64 / (1u64 << m) as f64 / 27.0;
    }
    assert!((p - 6.0 / 27.0).abs() < 1e-12);

    let trials = 600;
    let rep = detect_triangle_via_resistance(&g, &ReductionParams::default(), trials, 77).unwrap();
    let rate = rep.trials.iter().filter(|t| t.triangle).count() as f64 / trials as f64;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    assert!((rate - p).abs() <= 3.0 * sigma, "rate {rate} p {p}");
    assert!(rep.triangle);
}

#[test]
fn soundness_all_small_graphs() {
    let params = ReductionParams::default();
    let mut checked = 0;
    for n in 1..=6 {
        for g in all_graphs(n).unwrap() {
            if g.has_triangle() {
                continue;
            }
            let rep = detect_triangle_via_resistance(&g, &params, 4, g.m() as u64).unwrap();
            assert!(!rep.triangle, "{g:?}");
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn soundness_random_triangle_free() {
    let params = ReductionParams::default();
    let mut r = common::rng(6);
    for k in 0..200 {
        let n = r.random_range(8..=40);
        let g = random_triangle_free(n, r.random_range(0.1..0.5), &mut r);
        let rep = detect_triangle_via_resistance(&g, &params, 3, k).unwrap();
        assert!(!rep.triangle, "{g:?}");
        for t in &rep.trials {
            assert!(t.max_abs_p < 0.5);
        }
    }
}

#[test]
fn tail_bounds_against_dense_inverse() {
    let mut r = common::rng(7);
    let params = ReductionParams::default();
    for k in 0..20 {
        let n = 40;
        let g = {
            let mut e = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if r.random::<f64>() < 0.25 {
                        e.push((u, v));
                    }
                }
            }
            Graph::unweighted(n, e).unwrap()
        };
        let seed = derive_seed(100, k);
        let inst = sample_tripartite(&g, derive_seed(seed, 0)).unwrap();
        let sa = random_signing(&inst.h, derive_seed(seed, 1)).unwrap();
        let rho = sa.spectral_radius().unwrap();
        let a = sa.dense();
        let s = params.alpha / n as f64;
        let nmat = DenseOracle::new(&DenseMatrix::identity(n).sub(&a.scaled(s))).unwrap();
        let ninv = nmat.pinv();
        let a2 = a.matmul(&a);
        let a3 = a2.matmul(&a);
        let tail = tail_bound(params.alpha, n, rho);
        let v1: Vec<usize> = (0..n).filter(|&v| inst.labels[v] == 0).collect();
        let v2: Vec<usize> = (0..n).filter(|&v| inst.labels[v] == 1).collect();
        for i in 0..n {
            let approx = 1.0 + s * s * inst.h.degree(i);
            assert!((ninv[(i, i)] - approx).abs() <= tail * (1.0 + 1e-6) + 1e-14);
        }
        for &i in &v1 {
            for &j in &v2 {
                assert_eq!(a3[(i, j)], 0.0);
                let approx = s * s * a2[(i, j)];
                assert!((ninv[(i, j)] - approx).abs() <= tail * (1.0 + 1e-6) + 1e-14);
            }
        }
        let trial = run_resistance_trial(&g, &params, seed).unwrap();
        assert_eq!(trial.rho, rho);
    }
}

#[test]
fn spectral_detection_examples() {
    let fs = [
        SpectralFunction::SCHATTEN_3,
        SpectralFunction::SchattenP(4.0),
        SpectralFunction::SvdEntropy,
        SpectralFunction::LogDet,
        SpectralFunction::TraceExp,
    ];
    let c4 = signing_census(&Graph::complete(4)).unwrap();
    assert!(4 * c4.trace_nonzero >= c4.signings);
    for f in fs {
        assert!(!detect_triangle_via_spectral_sum(&Graph::cycle(6), f, 2.0, 30, 1).unwrap().triangle);
        assert!(detect_triangle_via_spectral_sum(&Graph::complete(3), f, 2.0, 20, 1).unwrap().triangle);
        let rep = detect_triangle_via_spectral_sum(&Graph::complete(4), f, 2.0, 10_000, 3).unwrap();
        let freq = rep.trials.iter().filter(|t| t.triangle).count() as f64 / 1e4;
        assert!(freq >= 0.25, "{f:?} {freq}");
        for t in &rep.trials {
            assert_eq!(t.triangle, t.trace_cube != 0);
        }
    }
}

#[test]
fn spectral_params_table() {
    let s3 = spectral_sum_params(SpectralFunction::SCHATTEN_3, 10, 2.0).unwrap();
    assert!((s3.delta - 1.0 / (10f64.sqrt() * 20f64.ln())).abs() < 1e-15);
    let te = spectral_sum_params(SpectralFunction::TraceExp, 10, 2.0).unwrap();
    let (c0, c3) = (te.c(0).to_f64(), te.c(3).to_f64());
    assert!((c0 / c3 - 6.0).abs() < 1e-14);
    let ld = spectral_sum_params(SpectralFunction::LogDet, 10, 2.0).unwrap();
    assert_eq!(ld.c(0).to_f64(), 0.0);
    let want = (ld.c(3).to_f64() * ld.delta / (ld.c(2).to_f64() * 100.0)).abs().min(1.0);
    assert!((ld.eps1 - want).abs() <= 1e-15 * want);
    assert!(spectral_sum_params(SpectralFunction::SchattenP(-1.0), 10, 2.0).is_err());
    assert!(spectral_sum_params(SpectralFunction::SCHATTEN_3, 10, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn signing_preserves_support(n in 2usize..15, p in 0.0f64..1.0, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if r.random::<f64>() < p {
                    e.push((u, v));
                }
            }
        }
        let g = Graph::unweighted(n, e).unwrap();
        let sa = random_signing(&g, seed).unwrap();
        let (a, s) = (g.adjacency_dense(), sa.dense());
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(s[(i, j)].abs(), a[(i, j)]);
                prop_assert_eq!(s[(i, j)], s[(j, i)]);
            }
        }
        let inst = sample_tripartite(&g, seed).unwrap();
        for &(u, v, _) in inst.h.edges() {
            let (x, y) = (inst.labels[u], inst.labels[v]);
            prop_assert!(x != y && !(x.min(y) == 0 && x.max(y) == 1));
        }
        prop_assert_eq!(inst.h.m() + inst.e12.len() + g.edges().iter().filter(|&&(u, v, _)| inst.labels[u] == inst.labels[v]).count(), g.m());
    }
}
