use std::f64::consts::TAU;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::seed;

use super::{KernelSpec, PointSet};

/// Random frequencies and phases defining an `m`-dimensional cosine feature map.
///
/// Rows of the frequency matrix are drawn from the spectral measure of the
/// kernel: for a mixture of Gaussians each row first picks a scale `γ_s` with
/// probability `weight_s`, then samples `N(0, 2γ_s·I)`. Phases are uniform on
/// `[0, 2π)`. The whole basis is a function of `(spec, dim, m, seed)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RffBasis {
    spec: KernelSpec,
    dim: usize,
    m: usize,
    frequencies: Vec<f64>,
    phases: Vec<f64>,
    normalizer: f64,
    seed: u64,
}

impl RffBasis {
    pub fn draw(spec: &KernelSpec, dim: usize, m: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return invalid("basis dimension must be at least 1");
        }
        if m == 0 {
            return invalid("feature count must be at least 1");
        }
        let mut rng = seed::rng(seed);
        let scales: Vec<f64> = spec.gammas().iter().map(|g| (2.0 * g).sqrt()).collect();
        let mut frequencies = Vec::with_capacity(m * dim);
        let mut phases = Vec::with_capacity(m);
        for _ in 0..m {
            let scale = scales[spec.component(rng.random::<f64>())];
            for _ in 0..dim {
                let z: f64 = StandardNormal.sample(&mut rng);
                frequencies.push(scale * z);
            }
            let mut b = rng.random::<f64>() * TAU;
            if b >= TAU {
                b = 0.0;
            }
            phases.push(b);
        }
        Ok(Self {
            spec: spec.clone(),
            dim,
            m,
            frequencies,
            phases,
            normalizer: spec.normalizer(),
            seed,
        })
    }

    /// Rebuilds a basis from stored frequencies and phases.
    pub fn from_parts(
        spec: &KernelSpec,
        dim: usize,
        seed: u64,
        frequencies: Vec<f64>,
        phases: Vec<f64>,
    ) -> Result<Self> {
        let m = phases.len();
        if dim == 0 || m == 0 {
            return invalid("basis needs positive dimension and feature count");
        }
        if frequencies.len() != m * dim {
            return invalid(format!(
                "expected {} frequencies for m={m}, dim={dim}, got {}",
                m * dim,
                frequencies.len()
            ));
        }
        if frequencies.iter().any(|w| !w.is_finite()) {
            return invalid("frequencies must be finite");
        }
        if phases.iter().any(|b| !(0.0..TAU).contains(b)) {
            return invalid("phases must lie in [0, 2π)");
        }
        Ok(Self {
            spec: spec.clone(),
            dim,
            m,
            frequencies,
            phases,
            normalizer: spec.normalizer(),
            seed,
        })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The constant `C_k`, total mass of the spectral measure.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn frequency(&self, j: usize) -> &[f64] {
        &self.frequencies[j * self.dim..(j + 1) * self.dim]
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got });
        }
        Ok(())
    }

    /// Writes `cos(⟨w_j, z⟩ + b_j)` for every feature `j` into `out`.
    pub(crate) fn cosines_into(&self, z: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.angle(j, z).cos();
        }
    }

    #[inline]
    fn angle(&self, j: usize, z: &[f64]) -> f64 {
        let w = self.frequency(j);
        let mut acc = self.phases[j];
        for (wi, zi) in w.iter().zip(z) {
            acc += wi * zi;
        }
        acc
    }

    /// Writes `cos(⟨w_j, z⟩ + b_j)` for every `j` into `out`, with a fast 1-D path.
    fn features_into(&self, z: &[f64], out: &mut [f64]) {
        match self.dim {
            1 => {
                let x = z[0];
                for ((o, w), b) in out.iter_mut().zip(&self.frequencies).zip(&self.phases) {
                    *o = (w * x + b).cos();
                }
            }
            _ => self.cosines_into(z, out),
        }
    }

    /// Pairwise sum of the feature vectors of `points[lo..hi]` into `bufs[0]`;
    /// `bufs[1..]` is scratch.
    ///
    /// Ranges always split at their midpoint, so `sum(S ++ S) = 2·sum(S)` exactly.
    fn tree_sum(&self, points: &PointSet, lo: usize, hi: usize, bufs: &mut [Vec<f64>]) {
        if hi - lo == 1 {
            self.features_into(points.point(lo), &mut bufs[0]);
            return;
        }
        let mid = lo + (hi - lo) / 2;
        self.tree_sum(points, lo, mid, bufs);
        self.tree_sum(points, mid, hi, &mut bufs[1..]);
        let (out, rest) = bufs.split_at_mut(1);
        for (a, b) in out[0].iter_mut().zip(&rest[0]) {
            *a += b;
        }
    }
}

/// Empirical mean embedding of a sample under an [`RffBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    values: Vec<f64>,
    basis_seed: u64,
}

impl Embedding {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// Seed of the basis that produced this embedding.
    pub fn basis_seed(&self) -> u64 {
        self.basis_seed
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// `values_j = (2·C_k/|S|) · Σ_{z∈S} cos(⟨w_j, z⟩ + b_j)`, summed pairwise.
pub fn embed_sample(points: &PointSet, basis: &RffBasis) -> Result<Embedding> {
    if points.is_empty() {
        return invalid("cannot embed an empty sample");
    }
    basis.check_dim(points.dim())?;
    let n = points.len();
    // depth of the midpoint-split recursion plus one output buffer
    let depth = (usize::BITS - (n - 1).leading_zeros()) as usize + 1;
    let mut bufs = vec![vec![0.0; basis.m]; depth];
    basis.tree_sum(points, 0, n, &mut bufs);
    let mut acc = bufs.swap_remove(0);
    let scale = 2.0 * basis.normalizer / points.len() as f64;
    for a in &mut acc {
        *a *= scale;
    }
    Ok(Embedding { values: acc, basis_seed: basis.seed })
}

/// Monte-Carlo estimate of the kernel:
/// `(2·C_k/m) · Σ_j cos(⟨w_j, z⟩ + b_j) · cos(⟨w_j, z2⟩ + b_j)`.
pub fn rff_kernel_estimate(z: &[f64], z2: &[f64], basis: &RffBasis) -> Result<f64> {
    basis.check_dim(z.len())?;
    basis.check_dim(z2.len())?;
    let sum: f64 = (0..basis.m)
        .map(|j| basis.angle(j, z).cos() * basis.angle(j, z2).cos())
        .sum();
    Ok(2.0 * basis.normalizer / basis.m as f64 * sum)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;

    fn zero_basis(phases: Vec<f64>) -> RffBasis {
        let m = phases.len();
        RffBasis::from_parts(&KernelSpec::gaussian(1.0).unwrap(), 1, 0, vec![0.0; m], phases)
            .unwrap()
    }

    #[test]
    fn hand_evaluated_embedding() {
        let basis = zero_basis(vec![0.0, FRAC_PI_2]);
        let e = embed_sample(&PointSet::scalars(&[0.0]), &basis).unwrap();
        assert_eq!(e.values()[0], 2.0);
        assert!(e.values()[1].abs() < 1e-15);
    }

    #[test]
    fn shape_contract() {
        let spec = KernelSpec::three_scale(1.0).unwrap();
        let basis = RffBasis::draw(&spec, 2, 3, 11).unwrap();
        assert_eq!(basis.frequencies().len(), 6);
        assert_eq!(basis.phases().len(), 3);
        assert!(basis.phases().iter().all(|b| (0.0..TAU).contains(b)));
        assert_eq!(basis.normalizer(), spec.normalizer());
    }

    #[test]
    fn invalid_shapes() {
        let spec = KernelSpec::gaussian(1.0).unwrap();
        assert!(RffBasis::draw(&spec, 0, 3, 0).is_err());
        assert!(RffBasis::draw(&spec, 1, 0, 0).is_err());
        let basis = RffBasis::draw(&spec, 2, 3, 0).unwrap();
        assert!(embed_sample(&PointSet::scalars(&[1.0]), &basis).is_err());
        assert!(embed_sample(&PointSet::new(2, vec![]).unwrap(), &basis).is_err());
        assert!(rff_kernel_estimate(&[1.0], &[1.0, 2.0], &basis).is_err());
    }

    #[test]
    fn frequency_variance_matches_spectral_measure() {
        // γ = 0.5 → N(0, 2γ) = N(0, 1)
        let basis = RffBasis::draw(&KernelSpec::gaussian(0.5).unwrap(), 1, 100_000, 3).unwrap();
        let w = basis.frequencies();
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (w.len() - 1) as f64;
        assert!((0.97..=1.03).contains(&var), "variance {var}");
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = KernelSpec::three_scale(0.7).unwrap();
        let a = RffBasis::draw(&spec, 3, 50, 99).unwrap();
        let b = RffBasis::draw(&spec, 3, 50, 99).unwrap();
        assert_eq!(a, b);
        let c = RffBasis::draw(&spec, 3, 50, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn kernel_estimate_at_origin_with_zero_phases() {
        let basis = zero_basis(vec![0.0; 4]);
        assert_eq!(rff_kernel_estimate(&[0.0], &[0.0], &basis).unwrap(), 2.0);
    }

    #[test]
    fn kernel_estimate_close_to_closed_form() {
        let basis = RffBasis::draw(&KernelSpec::gaussian(0.5).unwrap(), 1, 100_000, 5).unwrap();
        let est = rff_kernel_estimate(&[0.0], &[1.0], &basis).unwrap();
        assert!((est - (-0.5f64).exp()).abs() < 0.01, "estimate {est}");
    }

    #[test]
    fn kernel_estimate_symmetric() {
        let basis = RffBasis::draw(&KernelSpec::three_scale(1.3).unwrap(), 2, 257, 8).unwrap();
        let (z, z2) = ([0.3, -1.2], [2.0, 0.4]);
        assert_eq!(
            rff_kernel_estimate(&z, &z2, &basis).unwrap(),
            rff_kernel_estimate(&z2, &z, &basis).unwrap()
        );
    }

    #[test]
    fn embedding_is_a_sample_mean() {
        let basis = RffBasis::draw(&KernelSpec::gaussian(0.9).unwrap(), 1, 64, 1).unwrap();
        let e1 = embed_sample(&PointSet::scalars(&[0.4]), &basis).unwrap();
        let e2 = embed_sample(&PointSet::scalars(&[-1.1]), &basis).unwrap();
        let both = embed_sample(&PointSet::scalars(&[0.4, -1.1]), &basis).unwrap();
        for j in 0..64 {
            let avg = 0.5 * (e1.values()[j] + e2.values()[j]);
            assert!((both.values()[j] - avg).abs() < 1e-14);
            assert!(both.values()[j].abs() <= 2.0 * basis.normalizer());
        }
    }

    #[test]
    fn doubled_sample_embeds_identically() {
        let basis = RffBasis::draw(&KernelSpec::three_scale(0.7).unwrap(), 2, 33, 4).unwrap();
        for n in [1, 2, 3, 7, 50, 129] {
            let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![(i as f64 * 0.37).sin(), i as f64 / 9.0]).collect();
            let s = PointSet::from_rows(&rows).unwrap();
            let doubled = s.concat(&s).unwrap();
            assert_eq!(embed_sample(&s, &basis).unwrap(), embed_sample(&doubled, &basis).unwrap(), "n={n}");
        }
    }
}
