//! Empirical calibration of the bucket constant `c_s`: fraction of random
//! resistance queries within `eps` of the dense oracle, single sketch copy.
//!
//! cargo run --release -p resket-core --example calibrate -- [c_s ...]

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resket_core::{gen_expander, DenseOracle, SketchConfig, SketchSpectra, SpectralSketch};

fn main() {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let candidates = if args.is_empty() { vec![0.5, 1.0, 2.0] } else { args };
    for n in [100usize, 300, 500] {
        let g = gen_expander(n, 8, n as u64).expect("expander");
        let l = g.laplacian().expect("laplacian");
        let oracle = DenseOracle::from_graph(&g).expect("oracle");
        let spectra = SketchSpectra::compute(&l, &Default::default()).expect("spectra");
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let pairs: Vec<(usize, usize)> = (0..1000)
            .map(|_| loop {
                let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
                if a != b {
                    break (a, b);
                }
            })
            .collect();
        for &c_s in &candidates {
            for eps in [0.2, 0.1] {
                let cfg = SketchConfig { c_s, ..Default::default() };
                let mut worst = 1.0f64;
                let mut worst_err = 0.0f64;
                let start = Instant::now();
                for seed in 0..3 {
                    let sk = SpectralSketch::build_with_spectra(&l, eps, &cfg, seed, &spectra).expect("build");
                    let mut ok = 0;
                    for &(a, b) in &pairs {
                        let r = oracle.resistance(a, b);
                        let e = (sk.query_pair(a, b).expect("query") - r).abs() / r;
                        worst_err = worst_err.max(e);
                        if e <= eps {
                            ok += 1;
                        }
                    }
                    worst = worst.min(ok as f64 / pairs.len() as f64);
                }
                println!(
                    "n={n} kappa_bar={:.2} c_s={c_s} eps={eps} min_frac={worst:.4} max_rel_err={worst_err:.4} time/3={:.2?}",
                    spectra.kappa_bar(),
                    start.elapsed() / 3
                );
            }
        }
    }
}
