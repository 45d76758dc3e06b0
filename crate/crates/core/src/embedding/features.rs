use crate::error::{invalid, Result};

use super::{embed_sample, Embedding, PointSet, RffBasis};

/// Bases for bivariate featurization: one shared by both marginals, one for the joint.
#[derive(Debug, Clone, PartialEq)]
pub struct PairBases {
    pub marginal: RffBasis,
    pub joint: RffBasis,
}

impl PairBases {
    pub fn new(marginal: RffBasis, joint: RffBasis) -> Result<Self> {
        if marginal.dim() != 1 || joint.dim() != 2 {
            return invalid("pair bases need a 1-D marginal basis and a 2-D joint basis");
        }
        Ok(Self { marginal, joint })
    }

    pub fn feature_len(&self) -> usize {
        2 * self.marginal.m() + self.joint.m()
    }
}

/// Bases for triplet featurization: a 1-D marginal basis and a 3-D joint basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletBases {
    pub marginal: RffBasis,
    pub joint: RffBasis,
}

impl TripletBases {
    pub fn new(marginal: RffBasis, joint: RffBasis) -> Result<Self> {
        if marginal.dim() != 1 || joint.dim() != 3 {
            return invalid("triplet bases need a 1-D marginal basis and a 3-D joint basis");
        }
        Ok(Self { marginal, joint })
    }

    pub fn feature_len(&self) -> usize {
        2 * self.marginal.m() + self.joint.m()
    }
}

/// `(μ(P_x), μ(P_y), μ(P_xy))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairFeature {
    pub marginal_x: Embedding,
    pub marginal_y: Embedding,
    pub joint: Embedding,
}

impl PairFeature {
    /// Concatenation of the three blocks.
    pub fn to_vec(&self) -> Vec<f64> {
        concat(&self.marginal_x, &self.marginal_y, &self.joint)
    }

    pub fn len(&self) -> usize {
        self.marginal_x.m() + self.marginal_y.m() + self.joint.m()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `(μ(P_u), μ(P_v), μ(P_uvw))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletFeature {
    pub marginal_u: Embedding,
    pub marginal_v: Embedding,
    pub joint: Embedding,
}

impl TripletFeature {
    pub fn to_vec(&self) -> Vec<f64> {
        concat(&self.marginal_u, &self.marginal_v, &self.joint)
    }

    pub fn len(&self) -> usize {
        self.marginal_u.m() + self.marginal_v.m() + self.joint.m()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn concat(a: &Embedding, b: &Embedding, c: &Embedding) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.m() + b.m() + c.m());
    out.extend_from_slice(a.values());
    out.extend_from_slice(b.values());
    out.extend_from_slice(c.values());
    out
}

pub fn featurize_pair(x: &[f64], y: &[f64], bases: &PairBases) -> Result<PairFeature> {
    if x.len() != y.len() {
        return invalid("pair columns have different lengths");
    }
    Ok(PairFeature {
        marginal_x: embed_sample(&PointSet::scalars(x), &bases.marginal)?,
        marginal_y: embed_sample(&PointSet::scalars(y), &bases.marginal)?,
        joint: embed_sample(&PointSet::from_columns(&[x, y])?, &bases.joint)?,
    })
}

pub fn featurize_triplet(u: &[f64], v: &[f64], w: &[f64], bases: &TripletBases) -> Result<TripletFeature> {
    if u.len() != v.len() || u.len() != w.len() {
        return invalid("triplet columns have different lengths");
    }
    Ok(TripletFeature {
        marginal_u: embed_sample(&PointSet::scalars(u), &bases.marginal)?,
        marginal_v: embed_sample(&PointSet::scalars(v), &bases.marginal)?,
        joint: embed_sample(&PointSet::from_columns(&[u, v, w])?, &bases.joint)?,
    })
}
