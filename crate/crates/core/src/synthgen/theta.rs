use rayon::prelude::*;

use crate::embedding::{PairBases, PairFeature};
use crate::error::{invalid, Error, Result};
use crate::seed;

use super::{sample_pair, MotherParams};

const INT_LEVELS: [u32; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
const SIGMA_LEVELS: [f64; 11] = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0];

/// Size of the full search grid: `c, d_f ∈ {1..10}`, each sigma in `{0, 0.5, …, 5}`.
pub const THETA_GRID_LEN: usize = 10 * 11 * 11 * 11 * 10;

fn grid_point(mut idx: usize) -> MotherParams {
    let d_f = INT_LEVELS[idx % 10];
    idx /= 10;
    let sigma3 = SIGMA_LEVELS[idx % 11];
    idx /= 11;
    let sigma2 = SIGMA_LEVELS[idx % 11];
    idx /= 11;
    let sigma1 = SIGMA_LEVELS[idx % 11];
    idx /= 11;
    MotherParams { c: INT_LEVELS[idx], sigma1, sigma2, sigma3, d_f }
}

/// Every grid cell, ordered by `(c, sigma1, sigma2, sigma3, d_f)`.
pub fn theta_grid() -> Vec<MotherParams> {
    (0..THETA_GRID_LEN).map(grid_point).collect()
}

/// `budget` distinct grid cells drawn uniformly, kept in grid order.
/// A budget at or above the grid size returns the whole grid.
pub fn sample_theta_grid(budget: usize, seed: u64) -> Vec<MotherParams> {
    if budget >= THETA_GRID_LEN {
        return theta_grid();
    }
    let mut rng = seed::rng(seed);
    let mut idx = rand::seq::index::sample(&mut rng, THETA_GRID_LEN, budget).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(grid_point).collect()
}

/// Outcome of the transductive parameter search.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaFit {
    pub theta: MotherParams,
    pub index: usize,
    /// `Σ_i min_j ‖ν(S_i) − ν(Ŝ_j)‖²` per candidate.
    pub objectives: Vec<f64>,
}

/// Picks the candidate whose synthetic embeddings lie closest to the test embeddings.
///
/// Every candidate is probed with the same `n_probe` sample seeds; ties go
/// to the lowest candidate index.
pub fn fit_theta(
    test_features: &[PairFeature],
    candidates: &[MotherParams],
    n_probe: usize,
    n: usize,
    bases: &PairBases,
    seed: u64,
) -> Result<ThetaFit> {
    if candidates.is_empty() {
        return invalid("no candidate parameters");
    }
    if n_probe == 0 {
        return invalid("need at least one probe sample per candidate");
    }
    let tests: Vec<Vec<f64>> = test_features.iter().map(PairFeature::to_vec).collect();
    if let Some(bad) = tests.iter().find(|t| t.len() != bases.feature_len()) {
        return Err(Error::DimensionMismatch { expected: bases.feature_len(), got: bad.len() });
    }
    let objectives: Vec<f64> = candidates
        .par_iter()
        .map(|theta| {
            let probes: Vec<Vec<f64>> = (0..n_probe)
                .map(|j| {
                    let s = sample_pair(theta, n, seed::derive(seed, j as u64))?;
                    Ok(s.featurize(bases)?.to_vec())
                })
                .collect::<Result<_>>()?;
            Ok(transductive_objective(&tests, &probes))
        })
        .collect::<Result<_>>()?;
    let mut index = 0;
    for (i, v) in objectives.iter().enumerate() {
        if *v < objectives[index] {
            index = i;
        }
    }
    Ok(ThetaFit { theta: candidates[index], index, objectives })
}

fn transductive_objective(tests: &[Vec<f64>], probes: &[Vec<f64>]) -> f64 {
    tests
        .iter()
        .map(|t| {
            probes
                .iter()
                .map(|p| t.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{KernelSpec, RffBasis};

    fn bases() -> PairBases {
        let spec = KernelSpec::three_scale(0.5).unwrap();
        PairBases::new(RffBasis::draw(&spec, 1, 10, 1).unwrap(), RffBasis::draw(&spec, 2, 10, 2).unwrap())
            .unwrap()
    }

    #[test]
    fn grid_covers_levels() {
        let grid = theta_grid();
        assert_eq!(grid.len(), THETA_GRID_LEN);
        assert_eq!(grid[0], MotherParams { c: 1, sigma1: 0.0, sigma2: 0.0, sigma3: 0.0, d_f: 1 });
        assert_eq!(
            grid[THETA_GRID_LEN - 1],
            MotherParams { c: 10, sigma1: 5.0, sigma2: 5.0, sigma3: 5.0, d_f: 10 }
        );
        let sub = sample_theta_grid(200, 3);
        assert_eq!(sub.len(), 200);
        assert_eq!(sub, sample_theta_grid(200, 3));
        assert!(sub.iter().all(|t| grid.contains(t)));
    }

    #[test]
    fn singleton_candidate_wins() {
        let theta = MotherParams::new(2, 1.0, 1.0, 1.0, 3).unwrap();
        let s = sample_pair(&theta, 40, 100).unwrap();
        let fit = fit_theta(&[s.featurize(&bases()).unwrap()], &[theta], 2, 40, &bases(), 0).unwrap();
        assert_eq!(fit.theta, theta);
        assert_eq!(fit.index, 0);
    }

    #[test]
    fn exact_match_contributes_zero() {
        let theta = MotherParams::new(2, 1.0, 1.0, 1.0, 3).unwrap();
        let probe = sample_pair(&theta, 40, seed::derive(5, 0)).unwrap();
        let fit = fit_theta(&[probe.featurize(&bases()).unwrap()], &[theta], 3, 40, &bases(), 5).unwrap();
        assert_eq!(fit.objectives[0], 0.0);
    }

    #[test]
    fn ties_resolve_to_lowest_index() {
        let theta = MotherParams::new(2, 1.0, 1.0, 1.0, 3).unwrap();
        let s = sample_pair(&theta, 40, 1).unwrap();
        let fit = fit_theta(&[s.featurize(&bases()).unwrap()], &[theta, theta, theta], 2, 40, &bases(), 0).unwrap();
        assert_eq!(fit.index, 0);
    }

    #[test]
    fn rejects_empty_candidates() {
        assert!(fit_theta(&[], &[], 1, 10, &bases(), 0).is_err());
    }
}
