use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::embedding::{featurize_pair, PairBases, PairFeature};
use crate::error::{invalid, Error, Result};
use crate::seed::{self, Rng};

use super::NaturalCubicSpline;

/// Standard deviation used for every mixture component when `sigma2 = 0`,
/// where rejection sampling of positive deviations could never succeed.
pub const DEGENERATE_STD: f64 = 1e-6;

/// Parameters of the synthetic generator.
///
/// `sigma1` and `sigma2` are the standard deviations of the laws of the
/// mixture means and mixture standard deviations; `sigma3` is the upper end
/// of the uniform law of the noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotherParams {
    pub c: u32,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    pub d_f: u32,
}

impl MotherParams {
    pub fn new(c: u32, sigma1: f64, sigma2: f64, sigma3: f64, d_f: u32) -> Result<Self> {
        let theta = Self { c, sigma1, sigma2, sigma3, d_f };
        theta.validate()?;
        Ok(theta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c == 0 {
            return invalid("mixture needs at least one component");
        }
        if self.d_f == 0 {
            return invalid("mechanism needs at least one knot");
        }
        for (name, s) in [("sigma1", self.sigma1), ("sigma2", self.sigma2), ("sigma3", self.sigma3)] {
            if !(s.is_finite() && s >= 0.0) {
                return invalid(format!("{name} must be finite and nonnegative, got {s}"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for MotherParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{},{}", self.c, self.sigma1, self.sigma2, self.sigma3, self.d_f)
    }
}

impl FromStr for MotherParams {
    type Err = Error;

    /// Parses `c,sigma1,sigma2,sigma3,d_f`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return invalid(format!("expected c,sigma1,sigma2,sigma3,d_f, got {s:?}"));
        }
        let int = |p: &str| p.parse::<u32>().map_err(|_| Error::InvalidInput(format!("bad integer {p:?}")));
        let real = |p: &str| p.parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad number {p:?}")));
        Self::new(int(parts[0])?, real(parts[1])?, real(parts[2])?, real(parts[3])?, int(parts[4])?)
    }
}

/// A bivariate sample `{(x_j, y_j)}` with an optional direction label
/// (`+1` for X→Y, `−1` for Y→X, `0` for neither).
#[derive(Debug, Clone, PartialEq)]
pub struct CauseEffectSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub label: Option<i32>,
    pub name: Option<String>,
}

impl CauseEffectSample {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return invalid("x and y have different lengths");
        }
        if x.len() < 2 {
            return invalid("a cause-effect sample needs at least two observations");
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return invalid("sample contains non-finite values");
        }
        Ok(Self { x, y, label: None, name: None })
    }

    pub fn with_label(mut self, label: i32) -> Self {
        self.label = Some(label);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Exchanges the roles of X and Y, negating the label.
    pub fn swapped(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
            label: self.label.map(|l| -l),
            name: self.name.clone(),
        }
    }

    /// Both columns rescaled to zero mean and unit variance.
    pub fn standardized(&self) -> Self {
        let mut out = self.clone();
        standardize(&mut out.x);
        standardize(&mut out.y);
        out
    }

    pub fn featurize(&self, bases: &PairBases) -> Result<PairFeature> {
        featurize_pair(&self.x, &self.y, bases)
    }
}

/// Centers `values` and divides by the population standard deviation.
///
/// Input whose spread is within rounding error of its magnitude counts as
/// constant and becomes all zeros.
pub fn standardize(values: &mut [f64]) {
    if values.is_empty() {
        return;
    }
    let n = values.len() as f64;
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // the second pass removes the rounding residue of the first
    for _ in 0..2 {
        let mean = values.iter().sum::<f64>() / n;
        for v in values.iter_mut() {
            *v -= mean;
        }
    }
    let sd = (values.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    if sd <= CONSTANT_RTOL * scale {
        values.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    for v in values.iter_mut() {
        *v /= sd;
    }
}

/// Relative spread below which a column is treated as constant.
const CONSTANT_RTOL: f64 = 1e-12;

fn normal(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// A Gaussian mixture with random weights, means and standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl GaussianMixture {
    /// Weights are `U(0, 1)` normalized to sum one, means `N(0, sigma1²)`,
    /// and standard deviations `N(0, sigma2²)` conditioned on being positive.
    pub fn random(theta: &MotherParams, rng: &mut Rng) -> Self {
        let c = theta.c as usize;
        let mut weights: Vec<f64> = (0..c).map(|_| rng.random::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            weights.iter_mut().for_each(|w| *w /= total);
        } else {
            weights.iter_mut().for_each(|w| *w = 1.0 / c as f64);
        }
        let means = (0..c).map(|_| theta.sigma1 * normal(rng)).collect();
        let stds = (0..c)
            .map(|_| {
                if theta.sigma2 == 0.0 {
                    return DEGENERATE_STD;
                }
                loop {
                    let s = theta.sigma2 * normal(rng);
                    if s > 0.0 {
                        return s;
                    }
                }
            })
            .collect();
        Self { weights, means, stds }
    }

    pub fn draw(&self, n: usize, rng: &mut Rng) -> Vec<f64> {
        let c = self.weights.len();
        let mut cumulative = self.weights.clone();
        for k in 1..c {
            cumulative[k] += cumulative[k - 1];
        }
        (0..n)
            .map(|_| {
                let u = rng.random::<f64>();
                let k = cumulative.iter().position(|&t| u < t).unwrap_or(c - 1);
                self.means[k] + self.stds[k] * normal(rng)
            })
            .collect()
    }
}

/// Draws `n` standardized values from a random `c`-component Gaussian mixture.
pub fn sample_cause(theta: &MotherParams, n: usize, rng: &mut Rng) -> Vec<f64> {
    let mixture = GaussianMixture::random(theta, rng);
    let mut x = mixture.draw(n, rng);
    standardize(&mut x);
    x
}

/// A random spline mechanism with `d_f` standard-normal knot values on a
/// uniform grid spanning the range of `input`.
pub(crate) fn sample_mechanism(theta: &MotherParams, input: &[f64], rng: &mut Rng) -> NaturalCubicSpline {
    let lo = input.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = input.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let values: Vec<f64> = (0..theta.d_f).map(|_| normal(rng)).collect();
    NaturalCubicSpline::uniform(lo, hi, values)
}

/// Centered Gaussian noise whose variance is drawn from `U(0, sigma3)`.
pub(crate) fn sample_noise(theta: &MotherParams, n: usize, rng: &mut Rng) -> Vec<f64> {
    let sd = (rng.random::<f64>() * theta.sigma3).sqrt();
    (0..n).map(|_| sd * normal(rng)).collect()
}

/// Draws one labeled (`+1`, X→Y) synthetic cause-effect sample.
pub fn sample_pair(theta: &MotherParams, n: usize, seed: u64) -> Result<CauseEffectSample> {
    theta.validate()?;
    if n < 2 {
        return invalid("a cause-effect sample needs at least two observations");
    }
    let mut rng = seed::rng(seed);
    let x = sample_cause(theta, n, &mut rng);
    let noise = sample_noise(theta, n, &mut rng);
    let f = sample_mechanism(theta, &x, &mut rng);
    let mut y: Vec<f64> = x.iter().zip(&noise).map(|(xi, e)| f.eval(*xi) + e).collect();
    standardize(&mut y);
    Ok(CauseEffectSample { x, y, label: Some(1), name: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        (mean, v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n)
    }

    fn corr(a: &[f64], b: &[f64]) -> f64 {
        let (ma, va) = moments(a);
        let (mb, vb) = moments(b);
        let cov = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / a.len() as f64;
        cov / (va * vb).sqrt()
    }

    #[test]
    fn outputs_are_standardized() {
        let theta = MotherParams::new(3, 2.0, 2.0, 2.0, 5).unwrap();
        for seed in 0..20 {
            let s = sample_pair(&theta, 300, seed).unwrap();
            for col in [&s.x, &s.y] {
                let (m, v) = moments(col);
                assert!(m.abs() <= 1e-9 && (v - 1.0).abs() <= 1e-9, "seed {seed}: {m} {v}");
            }
            assert_eq!(s.label, Some(1));
        }
    }

    #[test]
    fn constant_mechanism_destroys_dependence() {
        let theta = MotherParams::new(2, 1.0, 1.0, 1.0, 1).unwrap();
        let s = sample_pair(&theta, 10_000, 4).unwrap();
        assert!(corr(&s.x, &s.y).abs() <= 0.1);
    }

    #[test]
    fn mixture_weights_and_stds() {
        let mut rng = seed::rng(5);
        for c in 1..=10 {
            let theta = MotherParams::new(c, 1.5, 0.5, 1.0, 3).unwrap();
            let mix = GaussianMixture::random(&theta, &mut rng);
            assert!((mix.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            assert!(mix.stds.iter().all(|s| *s > 0.0));
            assert_eq!(mix.means.len(), c as usize);
        }
    }

    #[test]
    fn degenerate_sigma2_terminates() {
        let theta = MotherParams::new(4, 1.0, 0.0, 0.5, 3).unwrap();
        let s = sample_pair(&theta, 100, 2).unwrap();
        assert!(s.x.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn deterministic() {
        let theta = MotherParams::new(3, 2.0, 2.0, 2.0, 5).unwrap();
        assert_eq!(sample_pair(&theta, 50, 77).unwrap(), sample_pair(&theta, 50, 77).unwrap());
        assert_ne!(sample_pair(&theta, 50, 77).unwrap(), sample_pair(&theta, 50, 78).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let theta = MotherParams::new(3, 2.0, 2.0, 2.0, 5).unwrap();
        assert!(sample_pair(&theta, 1, 0).is_err());
        assert!(MotherParams::new(0, 1.0, 1.0, 1.0, 1).is_err());
        assert!(MotherParams::new(1, -1.0, 1.0, 1.0, 1).is_err());
        assert!(CauseEffectSample::new(vec![1.0], vec![1.0]).is_err());
        assert!(CauseEffectSample::new(vec![1.0, f64::NAN], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn theta_string_round_trip() {
        let theta: MotherParams = "3, 2, 2.5, 0.5, 5".parse().unwrap();
        assert_eq!(theta, MotherParams::new(3, 2.0, 2.5, 0.5, 5).unwrap());
        assert_eq!(theta.to_string().parse::<MotherParams>().unwrap(), theta);
        assert!("3,2,2".parse::<MotherParams>().is_err());
    }

    #[test]
    fn swap_negates_label() {
        let s = CauseEffectSample::new(vec![1.0, 2.0], vec![3.0, 4.0]).unwrap().with_label(1);
        let t = s.swapped();
        assert_eq!(t.x, s.y);
        assert_eq!(t.label, Some(-1));
    }
}
