//! Synthetic cause-effect data from a parametric family of generators.
//!
//! A pair is produced by drawing a cause from a random Gaussian mixture,
//! pushing it through a random spline mechanism and adding Gaussian noise of
//! random variance. Three-variable samples follow the same recipe over the
//! eight DAGs on `{X, Y, Z}` used for training the triplet classifier.

mod pairs;
mod spline;
mod theta;
mod training;
mod triplets;

pub use pairs::{GaussianMixture, sample_cause, sample_pair, standardize, CauseEffectSample, MotherParams, DEGENERATE_STD};
pub use spline::NaturalCubicSpline;
pub use theta::{fit_theta, sample_theta_grid, theta_grid, ThetaFit, THETA_GRID_LEN};
pub use training::{
    build_pair_training_set, build_triplet_training_set, TripletExample, TRIPLET_ARRANGEMENTS,
};
pub use triplets::{sample_triplet, DagSpec, TripletSample, DAG_COUNT};
