//! Executable triangle-detection reductions: all-pairs SDD resistance
//! estimates and spectral-sum estimates each decide triangle existence.
//!
//! Estimates are exact oracle values perturbed adversarially within the
//! accuracy the reductions assume, so each run shows the construction works
//! at exactly that accuracy.

mod embedding;
mod exhaustive;
mod resistance;
mod signing;
mod spectral;
mod tripartite;

pub use embedding::{
    doubled_recovery, doubling_transform, embedding_lambda2, expander_embedding,
    sdd_resistances_via_graph, ResistanceEstimator,
};
pub use exhaustive::{all_graphs, signing_census, SigningCensus};
pub use resistance::{
    detect_triangle_via_resistance, run_resistance_trial, tail_bound, ReductionParams, ResistanceReport,
    ResistanceTrial,
};
pub use signing::{random_signing, SignedAdjacency};
pub use spectral::{
    detect_triangle_via_spectral_sum, run_spectral_trial, spectral_sum_params, SpectralReport,
    SpectralSumParams, SpectralTrial,
};
pub use tripartite::{sample_tripartite, TripartiteInstance};
