//! Versioned JSON persistence for trained models.
//!
//! Schema (`format_version = "rcc-model/1"`), keys in this order:
//!
//! ```text
//! {
//!   "format_version": "rcc-model/1",
//!   "kind": "pair" | "triplet",
//!   "bases": {
//!     "marginal": {"dim", "m", "seed", "kernel": {"gammas", "weights"}, ["frequencies", "phases"]},
//!     "joint":    { same fields }
//!   },
//!   "forest": {"classes", "n_features", "config", "seed", "trees": [...]},
//!   "training": {"theta": {"c","sigma1","sigma2","sigma3","d_f"}, "big_n", "n", "m", "trees", "seed"}
//! }
//! ```
//!
//! Bases are stored as seeds by default and redrawn on load; the optional
//! `frequencies` (row-major `m × dim`) and `phases` arrays pin them exactly.
//! Output is compact JSON followed by one newline, so save → load → save is
//! byte-identical.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use rcc_core::embedding::{KernelSpec, PairBases, RffBasis, TripletBases};
use rcc_core::forest::Forest;
use rcc_core::pipeline::{PairModel, TripletModel};
use rcc_core::synthgen::MotherParams;

use crate::error::{CliError, Result};
use crate::io::write_atomic;

pub const FORMAT_VERSION: &str = "rcc-model/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Pair,
    Triplet,
}

impl ModelKind {
    fn joint_dim(self) -> usize {
        match self {
            ModelKind::Pair => 2,
            ModelKind::Triplet => 3,
        }
    }

    fn classes(self) -> &'static [i32] {
        match self {
            ModelKind::Pair => &[-1, 1],
            ModelKind::Triplet => &[-1, 0, 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisRecord {
    pub dim: usize,
    pub m: usize,
    pub seed: u64,
    pub kernel: KernelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<f64>>,
}

impl BasisRecord {
    pub fn from_basis(basis: &RffBasis, full_matrix: bool) -> Self {
        Self {
            dim: basis.dim(),
            m: basis.m(),
            seed: basis.seed(),
            kernel: basis.spec().clone(),
            frequencies: full_matrix.then(|| basis.frequencies().to_vec()),
            phases: full_matrix.then(|| basis.phases().to_vec()),
        }
    }

    pub fn to_basis(&self) -> Result<RffBasis> {
        match (&self.frequencies, &self.phases) {
            (None, None) => Ok(RffBasis::draw(&self.kernel, self.dim, self.m, self.seed)?),
            (Some(w), Some(b)) => {
                if b.len() != self.m {
                    return Err(CliError::Data(format!("basis stores {} phases but m = {}", b.len(), self.m)));
                }
                Ok(RffBasis::from_parts(&self.kernel, self.dim, self.seed, w.clone(), b.clone())?)
            }
            _ => Err(CliError::Data("basis must store both frequencies and phases, or neither".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasesRecord {
    pub marginal: BasisRecord,
    pub joint: BasisRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingRecord {
    pub theta: MotherParams,
    pub big_n: usize,
    pub n: usize,
    pub m: usize,
    pub trees: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBundle {
    pub format_version: String,
    pub kind: ModelKind,
    pub bases: BasesRecord,
    pub forest: Forest,
    pub training: TrainingRecord,
}

/// A bundle's model with its bases materialized.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedModel {
    Pair(PairModel),
    Triplet(TripletModel),
}

impl ModelBundle {
    pub fn from_pair(model: &PairModel, training: TrainingRecord, full_matrix: bool) -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            kind: ModelKind::Pair,
            bases: BasesRecord {
                marginal: BasisRecord::from_basis(&model.bases.marginal, full_matrix),
                joint: BasisRecord::from_basis(&model.bases.joint, full_matrix),
            },
            forest: model.forest.clone(),
            training,
        }
    }

    pub fn from_triplet(model: &TripletModel, training: TrainingRecord, full_matrix: bool) -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            kind: ModelKind::Triplet,
            bases: BasesRecord {
                marginal: BasisRecord::from_basis(&model.bases.marginal, full_matrix),
                joint: BasisRecord::from_basis(&model.bases.joint, full_matrix),
            },
            forest: model.forest.clone(),
            training,
        }
    }

    /// Checks the version and every structural invariant.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::Version { found: self.format_version.clone(), expected: FORMAT_VERSION.into() });
        }
        self.training.theta.validate()?;
        self.forest.validate()?;
        if self.bases.marginal.dim != 1 || self.bases.joint.dim != self.kind.joint_dim() {
            return Err(CliError::Data(format!(
                "{:?} model needs basis dims (1, {}), found ({}, {})",
                self.kind,
                self.kind.joint_dim(),
                self.bases.marginal.dim,
                self.bases.joint.dim
            )));
        }
        let expected = 2 * self.bases.marginal.m + self.bases.joint.m;
        if self.forest.n_features() != expected {
            return Err(CliError::Data(format!(
                "forest expects {} features but bases produce {expected}",
                self.forest.n_features()
            )));
        }
        if self.forest.classes() != self.kind.classes() {
            return Err(CliError::Data(format!(
                "{:?} model needs classes {:?}, found {:?}",
                self.kind,
                self.kind.classes(),
                self.forest.classes()
            )));
        }
        Ok(())
    }

    pub fn into_model(self) -> Result<LoadedModel> {
        self.validate()?;
        let marginal = self.bases.marginal.to_basis()?;
        let joint = self.bases.joint.to_basis()?;
        Ok(match self.kind {
            ModelKind::Pair => LoadedModel::Pair(PairModel { bases: PairBases::new(marginal, joint)?, forest: self.forest }),
            ModelKind::Triplet => {
                LoadedModel::Triplet(TripletModel { bases: TripletBases::new(marginal, joint)?, forest: self.forest })
            }
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Parses and validates a bundle; the version is checked before the rest of the schema.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("format_version").and_then(|v| v.as_str()) {
            Some(FORMAT_VERSION) => {}
            Some(other) => {
                return Err(CliError::Version { found: other.to_string(), expected: FORMAT_VERSION.into() })
            }
            None => return Err(CliError::Data("model file has no format_version string".into())),
        }
        let bundle: ModelBundle = serde_json::from_value(value)?;
        bundle.validate()?;
        Ok(bundle)
    }
}

pub fn save_model(bundle: &ModelBundle, path: &Path) -> Result<()> {
    bundle.validate()?;
    write_atomic(path, bundle.to_json()?.as_bytes())
}

pub fn load_model(path: &Path) -> Result<ModelBundle> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ModelBundle::from_json(&text)
}
