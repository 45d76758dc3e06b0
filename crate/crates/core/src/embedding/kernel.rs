use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

use super::PointSet;

/// Bandwidth returned by [`median_heuristic`] when all points coincide.
pub const MEDIAN_FALLBACK_GAMMA: f64 = 1.0;

/// A convex combination of Gaussian kernels
/// `k(z, z') = Σ_s weight_s · exp(−gamma_s ‖z − z'‖²)`.
///
/// Weights sum to one, so `k(z, z) = 1` for every `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKernelSpec")]
pub struct KernelSpec {
    gammas: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawKernelSpec {
    gammas: Vec<f64>,
    weights: Vec<f64>,
}

impl TryFrom<RawKernelSpec> for KernelSpec {
    type Error = crate::Error;

    fn try_from(raw: RawKernelSpec) -> Result<Self> {
        Self::new(raw.gammas, raw.weights)
    }
}

impl KernelSpec {
    pub fn new(gammas: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() {
            return invalid("kernel needs at least one bandwidth");
        }
        if gammas.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return invalid("kernel bandwidths must be finite and positive");
        }
        if weights.len() != gammas.len() {
            return invalid("kernel weights and bandwidths differ in length");
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return invalid("kernel weights must be finite and nonnegative");
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("kernel weights sum to {total}, expected 1"));
        }
        Ok(Self { gammas, weights })
    }

    pub fn gaussian(gamma: f64) -> Result<Self> {
        Self::new(vec![gamma], vec![1.0])
    }

    /// Equal-weight mixture over the scales `0.1γ`, `γ` and `10γ`.
    pub fn three_scale(gamma: f64) -> Result<Self> {
        let third = 1.0 / 3.0;
        Self::new(
            vec![0.1 * gamma, gamma, 10.0 * gamma],
            vec![third, third, 1.0 - 2.0 * third],
        )
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total mass of the kernel's spectral measure.
    pub fn normalizer(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn eval(&self, z: &[f64], z2: &[f64]) -> f64 {
        let sq: f64 = z.iter().zip(z2).map(|(a, b)| (a - b) * (a - b)).sum();
        self.eval_sq_dist(sq)
    }

    pub fn eval_sq_dist(&self, sq: f64) -> f64 {
        self.gammas
            .iter()
            .zip(&self.weights)
            .map(|(g, w)| w * (-g * sq).exp())
            .sum()
    }

    /// Picks a mixture component from a uniform draw `u ∈ [0, 1)`.
    pub(crate) fn component(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (s, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return s;
            }
        }
        // rounding left `acc` a hair under one
        self.weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
    }
}

/// `γ = 1 / (2 · median ‖z_i − z_j‖²)` over all unordered pairs.
///
/// Falls back to [`MEDIAN_FALLBACK_GAMMA`] when the median is zero.
pub fn median_heuristic(points: &PointSet) -> Result<f64> {
    let n = points.len();
    if n < 2 {
        return invalid("median heuristic needs at least two points");
    }
    if !points.is_finite() {
        return invalid("median heuristic requires finite points");
    }
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let a = points.point(i);
        for j in i + 1..n {
            let b = points.point(j);
            dists.push(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>());
        }
    }
    let median = median_in_place(&mut dists);
    if median > 0.0 {
        Ok(1.0 / (2.0 * median))
    } else {
        Ok(MEDIAN_FALLBACK_GAMMA)
    }
}

fn median_in_place(values: &mut [f64]) -> f64 {
    let len = values.len();
    let mid = len / 2;
    let (_, upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if len % 2 == 1 {
        upper
    } else {
        let lower = values[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}
