//! Effective-resistance sketching for expander graphs.
//!
//! The crate builds an asymmetric CountSketch of the Laplacian pseudoinverse
//! (more generally of `M†` for a well-conditioned SDD matrix `M`), answers
//! resistance queries from it, and carries the supporting pieces: a
//! Jacobi-preconditioned CG solver with an a-posteriori error contract,
//! CountSketch inner-product estimation, a PSD quadratic-form sketch, a dense
//! brute-force oracle, and an executable harness for the triangle-detection
//! reductions that underpin the matching lower bounds.
//!
//! The crate is `no_std` + `alloc` when built without the default `std`
//! feature. With `std`, sketch construction runs its independent solves on
//! the rayon pool.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod countsketch;
pub mod dd;
pub mod dense;
pub mod error;
pub mod graph;
pub mod hardness;
pub mod lanczos;
pub mod oracle;
pub mod psd;
pub mod sdd;
pub mod sketch;

mod float;
mod seed;

pub use countsketch::{CountSketch, SketchedVector, SparseSketch};
pub use dense::{DenseMatrix, SymmetricEigen};
pub use error::{Error, Result};
pub use graph::{gen_expander, spectral_stats, Graph, SpectralStats};
pub use oracle::{DenseOracle, SpectralFunction};
pub use psd::PsdSketch;
pub use sdd::{KernelKind, SddMatrix, SolverHandle};
pub use seed::derive_seed;
pub use sketch::{
    numerical_sparsity, BoostedResistanceSketch, NumericalSparsityReport, SketchConfig, SketchSpectra,
    SpectralSketch,
};
