//! Causal direction scoring and small-graph reconstruction.

mod beliefs;
mod dag;
mod score;

pub use beliefs::{pairwise_beliefs, EdgeBeliefs};
pub use dag::{infer_dag, CausalDag, Edge};
pub use score::{decision_rate_curve, rcc_score, CausationScore, DecisionRateCurve};
