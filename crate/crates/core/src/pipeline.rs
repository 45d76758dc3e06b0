//! End-to-end training of the pair and triplet classifiers on synthetic data.
//!
//! Bandwidths come from the median heuristic on pooled synthetic points,
//! each basis approximates the equal-weight kernel mixture over
//! `{0.1γ, γ, 10γ}`, and every random stream is derived from one root seed.

use rand::Rng as _;

use crate::causal::{infer_dag, pairwise_beliefs, rcc_score, CausalDag, CausationScore, EdgeBeliefs};
use crate::embedding::{median_heuristic, KernelSpec, PairBases, PointSet, RffBasis, TripletBases};
use crate::error::{invalid, Result};
use crate::forest::{cv_select_num_trees, Dataset, Forest, ForestConfig};
use crate::seed;
use crate::synthgen::{
    build_pair_training_set, build_triplet_training_set, sample_pair, sample_triplet, CauseEffectSample, DagSpec,
    MotherParams, DAG_COUNT,
};

/// Synthetic samples pooled for the median heuristic.
pub const BANDWIDTH_PROBES: usize = 8;
/// Upper bound on pooled points fed to the median heuristic.
pub const BANDWIDTH_POINTS: usize = 1000;

/// How the ensemble size is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeCount {
    Fixed(usize),
    CrossValidate { grid: Vec<usize>, folds: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub theta: MotherParams,
    /// Number of synthetic samples drawn (`N`).
    pub big_n: usize,
    /// Observations per synthetic sample (`n`).
    pub n: usize,
    /// Random features per embedding block.
    pub m: usize,
    pub trees: TreeCount,
    pub forest: ForestConfig,
    pub seed: u64,
}

/// Median-heuristic bandwidth on an evenly strided subset of `points`.
pub fn pooled_gamma(points: &PointSet) -> Result<f64> {
    let n = points.len();
    if n <= BANDWIDTH_POINTS {
        return median_heuristic(points);
    }
    let stride = n.div_ceil(BANDWIDTH_POINTS);
    let rows: Vec<Vec<f64>> = (0..n).step_by(stride).map(|i| points.point(i).to_vec()).collect();
    median_heuristic(&PointSet::from_rows(&rows)?)
}

fn draw_bases(gamma_marginal: f64, gamma_joint: f64, joint_dim: usize, m: usize, root: u64) -> Result<(RffBasis, RffBasis)> {
    let marginal = RffBasis::draw(
        &KernelSpec::three_scale(gamma_marginal)?,
        1,
        m,
        seed::derive_named(root, "basis-marginal"),
    )?;
    let joint = RffBasis::draw(
        &KernelSpec::three_scale(gamma_joint)?,
        joint_dim,
        m,
        seed::derive_named(root, "basis-joint"),
    )?;
    Ok((marginal, joint))
}

/// Pair bases with bandwidths fitted to synthetic draws from `theta`.
pub fn pair_bases_for(theta: &MotherParams, n: usize, m: usize, root: u64) -> Result<PairBases> {
    let probe_seed = seed::derive_named(root, "bandwidth");
    let mut scalars = Vec::new();
    let mut joint = Vec::new();
    for i in 0..BANDWIDTH_PROBES {
        let s = sample_pair(theta, n, seed::derive(probe_seed, i as u64))?;
        scalars.extend_from_slice(&s.x);
        scalars.extend_from_slice(&s.y);
        joint.extend(s.x.iter().zip(&s.y).flat_map(|(a, b)| [*a, *b]));
    }
    let gm = pooled_gamma(&PointSet::scalars(&scalars))?;
    let gj = pooled_gamma(&PointSet::new(2, joint)?)?;
    let (marginal, joint) = draw_bases(gm, gj, 2, m, root)?;
    PairBases::new(marginal, joint)
}

/// Pair bases with bandwidths fitted to observed samples.
pub fn pair_bases_from_data(samples: &[CauseEffectSample], m: usize, root: u64) -> Result<PairBases> {
    if samples.is_empty() {
        return invalid("no samples to fit bandwidths on");
    }
    let scalars: Vec<f64> = samples.iter().flat_map(|s| s.x.iter().chain(&s.y).copied()).collect();
    let joint: Vec<f64> = samples
        .iter()
        .flat_map(|s| s.x.iter().zip(&s.y).flat_map(|(a, b)| [*a, *b]))
        .collect();
    let gm = pooled_gamma(&PointSet::scalars(&scalars))?;
    let gj = pooled_gamma(&PointSet::new(2, joint)?)?;
    let (marginal, joint) = draw_bases(gm, gj, 2, m, root)?;
    PairBases::new(marginal, joint)
}

/// Triplet bases with bandwidths fitted to synthetic triplets from `theta`.
pub fn triplet_bases_for(theta: &MotherParams, n: usize, m: usize, root: u64) -> Result<TripletBases> {
    let probe_seed = seed::derive_named(root, "bandwidth");
    let mut scalars = Vec::new();
    let mut joint = Vec::new();
    for i in 0..BANDWIDTH_PROBES {
        let task = seed::derive(probe_seed, i as u64);
        let dag = DagSpec::new(seed::rng(task).random_range(0..DAG_COUNT))?;
        let t = sample_triplet(theta, dag, n, seed::derive(task, 1))?;
        for c in &t.columns {
            scalars.extend_from_slice(c);
        }
        for j in 0..t.len() {
            joint.extend([t.columns[0][j], t.columns[1][j], t.columns[2][j]]);
        }
    }
    let gm = pooled_gamma(&PointSet::scalars(&scalars))?;
    let gj = pooled_gamma(&PointSet::new(3, joint)?)?;
    let (marginal, joint) = draw_bases(gm, gj, 3, m, root)?;
    TripletBases::new(marginal, joint)
}

fn choose_trees(data: &Dataset, config: &TrainingConfig) -> Result<usize> {
    match &config.trees {
        TreeCount::Fixed(k) => Ok(*k),
        TreeCount::CrossValidate { grid, folds } => {
            Ok(cv_select_num_trees(data, grid, *folds, seed::derive_named(config.seed, "cv"), config.forest)?.best)
        }
    }
}

/// A trained bivariate direction classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct PairModel {
    pub bases: PairBases,
    pub forest: Forest,
}

impl PairModel {
    pub fn train(config: &TrainingConfig) -> Result<Self> {
        let bases = pair_bases_for(&config.theta, config.n, config.m, config.seed)?;
        Self::train_with_bases(config, bases)
    }

    pub fn train_with_bases(config: &TrainingConfig, bases: PairBases) -> Result<Self> {
        let set = build_pair_training_set(
            &config.theta,
            config.big_n,
            config.n,
            &bases,
            seed::derive_named(config.seed, "pairs"),
        )?;
        let p = bases.feature_len();
        let mut features = Vec::with_capacity(set.len() * p);
        let mut labels = Vec::with_capacity(set.len());
        for (f, l) in set {
            features.extend(f.to_vec());
            labels.push(l);
        }
        let data = Dataset::new(features, p, labels)?;
        let trees = choose_trees(&data, config)?;
        let forest = Forest::train(&data, trees, seed::derive_named(config.seed, "forest"), config.forest)?;
        Ok(Self { bases, forest })
    }

    pub fn score(&self, sample: &CauseEffectSample) -> Result<CausationScore> {
        rcc_score(&self.forest, sample, &self.bases)
    }
}

/// A trained three-class (`−1`, `0`, `+1`) edge classifier for triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletModel {
    pub bases: TripletBases,
    pub forest: Forest,
}

impl TripletModel {
    pub fn train(config: &TrainingConfig) -> Result<Self> {
        let bases = triplet_bases_for(&config.theta, config.n, config.m, config.seed)?;
        let set = build_triplet_training_set(
            &config.theta,
            config.big_n,
            config.n,
            &bases,
            seed::derive_named(config.seed, "triplets"),
        )?;
        let p = bases.feature_len();
        let mut features = Vec::with_capacity(set.len() * p);
        let mut labels = Vec::with_capacity(set.len());
        for ex in set {
            features.extend(ex.feature.to_vec());
            labels.push(ex.label);
        }
        let data = Dataset::new(features, p, labels)?;
        let trees = choose_trees(&data, config)?;
        let forest = Forest::train(&data, trees, seed::derive_named(config.seed, "forest"), config.forest)?;
        Ok(Self { bases, forest })
    }

    pub fn beliefs(&self, columns: &[Vec<f64>], names: &[String]) -> Result<EdgeBeliefs> {
        pairwise_beliefs(&self.forest, columns, names, &self.bases)
    }

    pub fn infer(&self, columns: &[Vec<f64>], names: &[String]) -> Result<CausalDag> {
        Ok(infer_dag(&self.beliefs(columns, names)?))
    }
}
