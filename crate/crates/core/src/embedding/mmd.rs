use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

use super::{Embedding, KernelSpec, PointSet, RffBasis};

/// `mean_{s∈S, t∈T} k(s, t)`, summed row by row in a fixed order.
pub fn mean_kernel(s: &PointSet, t: &PointSet, spec: &KernelSpec) -> Result<f64> {
    if s.is_empty() || t.is_empty() {
        return invalid("kernel mean needs nonempty samples");
    }
    if s.dim() != t.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: t.dim() });
    }
    let rows: Vec<f64> = (0..s.len())
        .into_par_iter()
        .map(|i| {
            let a = s.point(i);
            t.iter().map(|b| spec.eval(a, b)).sum::<f64>()
        })
        .collect();
    Ok(rows.iter().sum::<f64>() / (s.len() as f64 * t.len() as f64))
}

/// Squared MMD between the empirical distributions of `s` and `t`, by the kernel trick.
pub fn exact_mmd_sq(s: &PointSet, t: &PointSet, spec: &KernelSpec) -> Result<f64> {
    let ss = mean_kernel(s, s, spec)?;
    let st = mean_kernel(s, t, spec)?;
    let tt = mean_kernel(t, t, spec)?;
    Ok((ss - 2.0 * st + tt).max(0.0))
}

pub fn exact_mmd(s: &PointSet, t: &PointSet, spec: &KernelSpec) -> Result<f64> {
    exact_mmd_sq(s, t, spec).map(f64::sqrt)
}

/// Squared MMD reconstructed from two embeddings under the same basis:
/// `‖a − b‖² / (2·C_k·m)`.
pub fn rff_mmd_sq(a: &Embedding, b: &Embedding, basis: &RffBasis) -> Result<f64> {
    if a.m() != basis.m() || b.m() != basis.m() {
        return Err(Error::DimensionMismatch { expected: basis.m(), got: a.m().min(b.m()) });
    }
    if a.basis_seed() != basis.seed() || b.basis_seed() != basis.seed() {
        return invalid("embeddings were produced by a different basis");
    }
    let sq: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sq / (2.0 * basis.normalizer() * basis.m() as f64))
}
