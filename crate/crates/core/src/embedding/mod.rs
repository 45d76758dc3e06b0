//! Kernel mean embeddings approximated with random Fourier features.
//!
//! The Gaussian kernel `k(z, z') = exp(-γ‖z − z'‖²)` (or a convex mixture of
//! several scales) is shift-invariant, so it can be written as an expectation
//! of products of random cosines. Sampling `m` frequency/phase pairs gives
//! an explicit `m`-dimensional map whose sample mean stands in for the
//! infinite-dimensional mean embedding of an empirical distribution.
//!
//! Normalization conventions:
//!
//! * [`embed_sample`] returns `(2·c_k/|S|)·Σ_z cos(⟨w_j, z⟩ + b_j)` with no
//!   `1/m` factor.
//! * [`rff_kernel_estimate`] and the MMD reconstruction put the `1/m` back:
//!   for embeddings `a` of `S` and `b` of `T`, the estimated mean kernel is
//!   `⟨a, b⟩ / (2·c_k·m)`, so the estimated squared MMD is
//!   `‖a − b‖² / (2·c_k·m)` (see [`rff_mmd_sq`]).

mod basis;
mod bounds;
mod features;
mod kernel;
mod mmd;
mod points;

pub use basis::{embed_sample, rff_kernel_estimate, Embedding, RffBasis};
pub use bounds::{
    lemma1_bound, lemma1_error_estimate, log_log_slope, rate_slope_estimate, standard_normal_points,
};
pub use features::{
    featurize_pair, featurize_triplet, PairBases, PairFeature, TripletBases, TripletFeature,
};
pub use kernel::{median_heuristic, KernelSpec, MEDIAN_FALLBACK_GAMMA};
pub use mmd::{exact_mmd, exact_mmd_sq, mean_kernel, rff_mmd_sq};
pub use points::PointSet;
