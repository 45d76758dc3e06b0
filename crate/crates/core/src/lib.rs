//! Learning cause-effect inference rules over probability distributions.
//!
//! Samples are featurized with random-Fourier-feature approximations of
//! kernel mean embeddings, a tree ensemble is trained on synthetic labeled
//! cause-effect samples, and the resulting classifier scores the causal
//! direction of new pairs or reconstructs small causal graphs.
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`embedding`] | kernels, random Fourier bases, mean embeddings, MMD oracles, bound checks |
//! | [`synthgen`] | synthetic cause-effect pairs and three-variable DAG samples |
//! | [`forest`] | Gini random forest with class probabilities and tree-count CV |
//! | [`causal`] | causation coefficient, decision-rate curves, DAG reconstruction |
//! | [`pipeline`] | end-to-end training of the pair and triplet classifiers |

pub mod causal;
pub mod embedding;
pub mod error;
pub mod forest;
pub mod pipeline;
pub mod seed;
pub mod synthgen;

pub use error::{Error, Result};
