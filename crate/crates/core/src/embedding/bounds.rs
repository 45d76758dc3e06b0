//! Monte-Carlo checks of the approximation and convergence guarantees.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::seed;

use super::{embed_sample, mean_kernel, KernelSpec, PointSet, RffBasis};

/// `n` i.i.d. draws from the standard normal on ℝ^dim.
pub fn standard_normal_points(n: usize, dim: usize, seed: u64) -> PointSet {
    let mut rng = seed::rng(seed);
    let data: Vec<f64> = (0..n * dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    PointSet::new(dim.max(1), data).expect("dimension checked")
}

/// `(2·C_k/√m)·(1 + √(2·ln(n/δ)))`, the high-probability bound on the
/// `L2(Q)` error of the random-feature reconstruction of a mean embedding.
pub fn lemma1_bound(normalizer: f64, m: usize, n: usize, delta: f64) -> f64 {
    2.0 * normalizer / (m as f64).sqrt() * (1.0 + (2.0 * (n as f64 / delta).ln()).sqrt())
}

/// RMS over `q_samples` standard-normal test points `t` of the gap between the
/// exact empirical embedding `mean_z k(z, t)` and its reconstruction
/// `(2·C_k/(n·m)) Σ_z Σ_j cos(⟨w_j, z⟩ + b_j) cos(⟨w_j, t⟩ + b_j)`.
pub fn lemma1_error_estimate(
    sample: &PointSet,
    basis: &RffBasis,
    spec: &KernelSpec,
    q_samples: usize,
    seed: u64,
) -> Result<f64> {
    if q_samples == 0 {
        return invalid("need at least one test point");
    }
    if sample.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), got: sample.dim() });
    }
    let embedding = embed_sample(sample, basis)?;
    let tests = standard_normal_points(q_samples, basis.dim(), seed);
    let inv_m = 1.0 / basis.m() as f64;
    let inv_n = 1.0 / sample.len() as f64;
    let sq_errors: Vec<f64> = (0..q_samples)
        .into_par_iter()
        .map_init(
            || vec![0.0; basis.m()],
            |cos, i| {
                let t = tests.point(i);
                let exact = sample.iter().map(|z| spec.eval(z, t)).sum::<f64>() * inv_n;
                basis.cosines_into(t, cos);
                let approx = embedding
                    .values()
                    .iter()
                    .zip(cos.iter())
                    .map(|(e, c)| e * c)
                    .sum::<f64>()
                    * inv_m;
                (exact - approx).powi(2)
            },
        )
        .collect();
    Ok((sq_errors.iter().sum::<f64>() / q_samples as f64).sqrt())
}

/// Least-squares slope of `ln(deviation)` against `ln(size)`.
pub fn log_log_slope(sizes: &[usize], deviations: &[f64]) -> Result<f64> {
    if sizes.len() != deviations.len() || sizes.len() < 2 {
        return invalid("slope needs at least two (size, deviation) points");
    }
    if deviations.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return invalid("deviations must be positive for a log-log fit");
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = deviations.iter().map(|d| d.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Per-size mean deviations and their fitted log-log slope.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSlopeReport {
    pub sizes: Vec<usize>,
    pub mean_deviations: Vec<f64>,
    pub slope: f64,
}

/// Empirical convergence rate of `‖μ(P_S) − μ(P)‖` for the 2-D standard normal.
///
/// The population embedding is stood in for by a reference sample of
/// `10·max(sizes)` points; its self-term is computed once.
pub fn rate_slope_estimate(
    dist_seed: u64,
    sizes: &[usize],
    reps: usize,
    spec: &KernelSpec,
) -> Result<RateSlopeReport> {
    if sizes.len() < 2 {
        return invalid("need at least two sample sizes");
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return invalid("sample sizes must be positive and strictly increasing");
    }
    if reps == 0 {
        return invalid("need at least one repetition");
    }
    const DIM: usize = 2;
    let reference = standard_normal_points(10 * sizes[sizes.len() - 1], DIM, seed::derive(dist_seed, 0));
    let ref_self = self_mean_kernel(&reference, spec);
    let mut mean_deviations = Vec::with_capacity(sizes.len());
    for (a, &n) in sizes.iter().enumerate() {
        let size_seed = seed::derive(dist_seed, 1 + a as u64);
        let mut total = 0.0;
        for r in 0..reps {
            let s = standard_normal_points(n, DIM, seed::derive(size_seed, r as u64));
            let sq = mean_kernel(&s, &s, spec)? - 2.0 * mean_kernel(&s, &reference, spec)? + ref_self;
            total += sq.max(0.0).sqrt();
        }
        mean_deviations.push(total / reps as f64);
    }
    let slope = log_log_slope(sizes, &mean_deviations)?;
    Ok(RateSlopeReport { sizes: sizes.to_vec(), mean_deviations, slope })
}

/// `mean_{s,s'∈S} k(s, s')` visiting each unordered pair once.
fn self_mean_kernel(s: &PointSet, spec: &KernelSpec) -> f64 {
    let n = s.len();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = s.point(i);
            (i + 1..n).map(|j| spec.eval(a, s.point(j))).sum::<f64>()
        })
        .collect();
    let diag: f64 = s.iter().map(|z| spec.eval(z, z)).sum();
    (diag + 2.0 * rows.iter().sum::<f64>()) / (n as f64 * n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_secant_for_two_points() {
        let s = log_log_slope(&[10, 40], &[0.2, 0.1]).unwrap();
        let secant = (0.1f64.ln() - 0.2f64.ln()) / (40f64.ln() - 10f64.ln());
        assert!((s - secant).abs() < 1e-14);
    }

    #[test]
    fn slope_invariant_to_scaling() {
        let sizes = [32, 64, 128, 256];
        let devs = [0.31, 0.2, 0.16, 0.1];
        let doubled: Vec<f64> = devs.iter().map(|d| 2.0 * d).collect();
        let a = log_log_slope(&sizes, &devs).unwrap();
        let b = log_log_slope(&sizes, &doubled).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn two_size_single_rep_is_secant() {
        let spec = KernelSpec::gaussian(0.5).unwrap();
        let r = rate_slope_estimate(4, &[8, 32], 1, &spec).unwrap();
        let secant = (r.mean_deviations[1].ln() - r.mean_deviations[0].ln()) / (32f64.ln() - 8f64.ln());
        assert!((r.slope - secant).abs() < 1e-12);
    }

    #[test]
    fn self_mean_matches_full_mean() {
        let spec = KernelSpec::three_scale(0.3).unwrap();
        let s = standard_normal_points(40, 2, 9);
        let full = mean_kernel(&s, &s, &spec).unwrap();
        assert!((self_mean_kernel(&s, &spec) - full).abs() < 1e-13);
    }

    #[test]
    fn single_feature_closed_form() {
        // W = 0, b = 0 on S = {0}: reconstruction is (1/1)·2·1 = 2 at every t,
        // exact is exp(−γ t²).
        let spec = KernelSpec::gaussian(0.5).unwrap();
        let basis = RffBasis::from_parts(&spec, 1, 0, vec![0.0], vec![0.0]).unwrap();
        let s = PointSet::scalars(&[0.0]);
        let q = 64;
        let got = lemma1_error_estimate(&s, &basis, &spec, q, 17).unwrap();
        let tests = standard_normal_points(q, 1, 17);
        let expected = (tests
            .iter()
            .map(|t| ((-0.5 * t[0] * t[0]).exp() - 2.0).powi(2))
            .sum::<f64>()
            / q as f64)
            .sqrt();
        assert!((got - expected).abs() < 1e-14);
    }

    #[test]
    fn validation() {
        let spec = KernelSpec::gaussian(0.5).unwrap();
        assert!(rate_slope_estimate(0, &[8], 1, &spec).is_err());
        assert!(rate_slope_estimate(0, &[8, 8], 1, &spec).is_err());
        assert!(rate_slope_estimate(0, &[8, 16], 0, &spec).is_err());
        let basis = RffBasis::draw(&spec, 1, 4, 0).unwrap();
        assert!(lemma1_error_estimate(&PointSet::scalars(&[0.0]), &basis, &spec, 0, 0).is_err());
    }
}
