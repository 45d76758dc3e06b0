//! Random forest of Gini classification trees.
//!
//! Each tree is grown on a bootstrap resample with `⌈√p⌉` candidate features
//! per node, midpoint thresholds, and no depth limit by default. Trees get
//! seeds derived from the forest seed and their index, so a forest with `k`
//! trees is exactly the first `k` trees of any larger forest with the same
//! seed; [`cv_select_num_trees`] relies on that.

mod cv;
mod tree;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::seed;

pub use cv::{cv_select_num_trees, CvOutcome, DEFAULT_TREE_GRID};
pub use tree::{Node, Tree};

/// Feature matrix (row-major) with one class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<i32>,
}

impl Dataset {
    pub fn new(features: Vec<f64>, n_features: usize, labels: Vec<i32>) -> Result<Self> {
        if labels.is_empty() {
            return invalid("dataset has no rows");
        }
        if n_features == 0 {
            return invalid("dataset has no features");
        }
        if features.len() != labels.len() * n_features {
            return invalid(format!(
                "{} feature values do not form {} rows of {n_features}",
                features.len(),
                labels.len()
            ));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return invalid("dataset contains non-finite features");
        }
        Ok(Self { features, n_features, labels })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<i32>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return invalid("dataset has no rows");
        };
        let p = first.len();
        if rows.iter().any(|r| r.len() != p) {
            return invalid("rows have different lengths");
        }
        if rows.len() != labels.len() {
            return invalid("row and label counts differ");
        }
        Self::new(rows.concat(), p, labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn labels(&self) -> &[i32] {
        &self.labels
    }

    /// Sorted distinct labels.
    pub fn classes(&self) -> Vec<i32> {
        let mut c = self.labels.clone();
        c.sort_unstable();
        c.dedup();
        c
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self::new(features, self.n_features, labels)
    }

    /// Applies `f(feature_index, value)` to every entry.
    pub fn map_features(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let p = self.n_features;
        let features = self.features.iter().enumerate().map(|(k, v)| f(k % p, *v)).collect();
        Self::new(features, p, self.labels.clone())
    }
}

/// How many features are examined at each node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `⌈√p⌉`
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(&self, p: usize) -> usize {
        let k = match *self {
            MaxFeatures::Sqrt => (p as f64).sqrt().ceil() as usize,
            MaxFeatures::All => p,
            MaxFeatures::Count(k) => k,
        };
        k.clamp(1, p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub bootstrap: bool,
    pub max_features: MaxFeatures,
    pub min_samples_leaf: usize,
    pub max_depth: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self { bootstrap: true, max_features: MaxFeatures::Sqrt, min_samples_leaf: 1, max_depth: None }
    }
}

impl ForestConfig {
    /// Every tree sees all rows and all features: a deterministic exact fit.
    pub fn exhaustive() -> Self {
        Self { bootstrap: false, max_features: MaxFeatures::All, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    classes: Vec<i32>,
    n_features: usize,
    config: ForestConfig,
    seed: u64,
    trees: Vec<Tree>,
}

impl Forest {
    pub fn train(data: &Dataset, num_trees: usize, seed: u64, config: ForestConfig) -> Result<Self> {
        if num_trees == 0 {
            return invalid("forest needs at least one tree");
        }
        if data.is_empty() {
            return invalid("cannot train on an empty dataset");
        }
        if config.min_samples_leaf == 0 {
            return invalid("min_samples_leaf must be at least 1");
        }
        let classes = data.classes();
        let targets: Vec<usize> = data
            .labels()
            .iter()
            .map(|l| classes.binary_search(l).expect("label present"))
            .collect();
        let trees = (0..num_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = seed::rng(seed::derive(seed, t as u64));
                tree::grow(data, &targets, classes.len(), &config, &mut rng)
            })
            .collect();
        Ok(Self { classes, n_features: data.n_features(), config, seed, trees })
    }

    pub fn classes(&self) -> &[i32] {
        &self.classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn num_trees(&self) -> usize {
        self.trees.len()
    }

    fn check_input(&self, feature: &[f64]) -> Result<()> {
        if feature.len() != self.n_features {
            return Err(Error::DimensionMismatch { expected: self.n_features, got: feature.len() });
        }
        if feature.iter().any(|v| !v.is_finite()) {
            return invalid("feature vector contains non-finite values");
        }
        Ok(())
    }

    /// Mean over trees of the leaf class frequencies, ordered as [`Forest::classes`].
    pub fn predict_proba(&self, feature: &[f64]) -> Result<Vec<f64>> {
        self.check_input(feature)?;
        let mut acc = vec![0.0; self.classes.len()];
        for t in &self.trees {
            t.add_frequencies(feature, &mut acc);
        }
        let k = self.trees.len() as f64;
        acc.iter_mut().for_each(|p| *p /= k);
        Ok(acc)
    }

    /// Probability of class `label`, or zero if the forest never saw it.
    pub fn class_probability(&self, feature: &[f64], label: i32) -> Result<f64> {
        let proba = self.predict_proba(feature)?;
        Ok(self.classes.iter().position(|&c| c == label).map_or(0.0, |i| proba[i]))
    }

    /// Most probable class; ties go to the smaller label.
    pub fn predict(&self, feature: &[f64]) -> Result<i32> {
        let proba = self.predict_proba(feature)?;
        Ok(self.classes[argmax(&proba)])
    }

    /// Leaf class counts reached by `feature` in tree `t`.
    pub fn leaf_counts(&self, t: usize, feature: &[f64]) -> Result<&[u32]> {
        self.check_input(feature)?;
        Ok(self.trees[t].leaf(feature))
    }

    /// Checks class and feature bookkeeping of a deserialized forest.
    pub fn validate(&self) -> Result<()> {
        if self.trees.is_empty() {
            return invalid("forest has no trees");
        }
        if self.classes.is_empty() || self.classes.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("forest classes must be nonempty and strictly increasing");
        }
        for (i, t) in self.trees.iter().enumerate() {
            t.validate(self.n_features, self.classes.len())
                .map_err(|e| Error::InvalidInput(format!("tree {i}: {e}")))?;
        }
        Ok(())
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
