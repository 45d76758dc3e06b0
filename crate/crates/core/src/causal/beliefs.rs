use rayon::prelude::*;

use crate::embedding::{embed_sample, Embedding, PointSet, TripletBases};
use crate::error::{invalid, Error, Result};
use crate::forest::Forest;

/// Per ordered pair `(i, j)` the probabilities of `X_i → X_j`, of no edge,
/// and of `X_i ← X_j`. Diagonals are unused and zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeBeliefs {
    pub names: Vec<String>,
    pub forward: Vec<Vec<f64>>,
    pub independent: Vec<Vec<f64>>,
    pub backward: Vec<Vec<f64>>,
}

impl EdgeBeliefs {
    /// Builds beliefs from `forward(i, j)` and a symmetric `independent(i, j)`,
    /// with `backward(i, j) = forward(j, i)`.
    pub fn from_forward_independent(
        names: Vec<String>,
        forward: impl Fn(usize, usize) -> f64,
        independent: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let d = names.len();
        let fill = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
            (0..d).map(|i| (0..d).map(|j| if i == j { 0.0 } else { f(i, j) }).collect()).collect()
        };
        let fwd = fill(&forward);
        let bwd = fill(&|i, j| forward(j, i));
        let ind = fill(&independent);
        let beliefs = Self { names, forward: fwd, independent: ind, backward: bwd };
        beliefs.validate()?;
        Ok(beliefs)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.names.len();
        for m in [&self.forward, &self.independent, &self.backward] {
            if m.len() != d || m.iter().any(|r| r.len() != d) {
                return invalid("belief matrices must be d×d");
            }
        }
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    continue;
                }
                let (f, o, b) = (self.forward[i][j], self.independent[i][j], self.backward[i][j]);
                if [f, o, b].iter().any(|p| !(p.is_finite() && (-1e-12..=1.0 + 1e-12).contains(p))) {
                    return invalid(format!("beliefs for ({i}, {j}) are not probabilities"));
                }
                if (f + o + b - 1.0).abs() > 1e-9 {
                    return invalid(format!("beliefs for ({i}, {j}) do not sum to one"));
                }
                if f != self.backward[j][i] || o != self.independent[j][i] {
                    return invalid(format!("beliefs for ({i}, {j}) and ({j}, {i}) disagree"));
                }
            }
        }
        Ok(())
    }
}

/// Class probabilities of the triplet classifier for every ordered pair,
/// averaged over every remaining variable used as context, then reconciled
/// across the two orderings of the pair.
///
/// `columns` holds one observation vector per variable.
pub fn pairwise_beliefs(
    model: &Forest,
    columns: &[Vec<f64>],
    names: &[String],
    bases: &TripletBases,
) -> Result<EdgeBeliefs> {
    let d = columns.len();
    if d < 3 {
        return invalid("pairwise beliefs need at least three variables");
    }
    if names.len() != d {
        return invalid("one name per variable is required");
    }
    if model.n_features() != bases.feature_len() {
        return Err(Error::DimensionMismatch { expected: model.n_features(), got: bases.feature_len() });
    }
    let class_pos = |label: i32| -> Result<usize> {
        model
            .classes()
            .iter()
            .position(|&c| c == label)
            .ok_or_else(|| Error::InvalidInput(format!("triplet model lacks class {label}")))
    };
    let (pos_back, pos_none, pos_fwd) = (class_pos(-1)?, class_pos(0)?, class_pos(1)?);

    let marginals: Vec<Embedding> = columns
        .iter()
        .map(|c| embed_sample(&PointSet::scalars(c), &bases.marginal))
        .collect::<Result<_>>()?;

    let ordered: Vec<(usize, usize)> =
        (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    // (p_fwd, p_none, p_back) for each ordered pair, averaged over contexts
    let raw: Vec<[f64; 3]> = ordered
        .par_iter()
        .map(|&(i, j)| {
            let mut acc = [0.0; 3];
            let mut contexts = 0;
            let mut feature = Vec::with_capacity(bases.feature_len());
            for k in (0..d).filter(|&k| k != i && k != j) {
                let joint = PointSet::from_columns(&[&columns[i], &columns[j], &columns[k]])?;
                feature.clear();
                feature.extend_from_slice(marginals[i].values());
                feature.extend_from_slice(marginals[j].values());
                feature.extend_from_slice(embed_sample(&joint, &bases.joint)?.values());
                let p = model.predict_proba(&feature)?;
                acc[0] += p[pos_fwd];
                acc[1] += p[pos_none];
                acc[2] += p[pos_back];
                contexts += 1;
            }
            Ok(acc.map(|a| a / contexts as f64))
        })
        .collect::<Result<_>>()?;

    let mut avg = vec![vec![[0.0; 3]; d]; d];
    for (&(i, j), p) in ordered.iter().zip(raw) {
        avg[i][j] = p;
    }
    let mut forward = vec![vec![0.0; d]; d];
    let mut independent = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            if i != j {
                forward[i][j] = 0.5 * (avg[i][j][0] + avg[j][i][2]);
                independent[i][j] = 0.5 * (avg[i][j][1] + avg[j][i][1]);
            }
        }
    }
    let backward = (0..d).map(|i| (0..d).map(|j| forward[j][i]).collect()).collect();
    Ok(EdgeBeliefs { names: names.to_vec(), forward, independent, backward })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{KernelSpec, RffBasis};
    use crate::forest::{Dataset, ForestConfig};
    use crate::seed;
    use rand::Rng as _;

    fn setup() -> (Forest, TripletBases) {
        let spec = KernelSpec::three_scale(0.5).unwrap();
        let bases = TripletBases::new(
            RffBasis::draw(&spec, 1, 6, 1).unwrap(),
            RffBasis::draw(&spec, 3, 6, 2).unwrap(),
        )
        .unwrap();
        let mut rng = seed::rng(3);
        let rows: Vec<Vec<f64>> = (0..60).map(|_| (0..18).map(|_| rng.random::<f64>()).collect()).collect();
        let labels = (0..60).map(|i| (i % 3) - 1).collect();
        let forest = Forest::train(&Dataset::from_rows(&rows, labels).unwrap(), 15, 4, ForestConfig::default()).unwrap();
        (forest, bases)
    }

    fn columns(d: usize, n: usize, s: u64) -> Vec<Vec<f64>> {
        let mut rng = seed::rng(s);
        (0..d).map(|_| (0..n).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect()).collect()
    }

    #[test]
    fn invariants_on_random_inputs() {
        let (forest, bases) = setup();
        for (d, s) in [(3, 1), (4, 2), (5, 3)] {
            let names: Vec<String> = (0..d).map(|i| format!("v{i}")).collect();
            let b = pairwise_beliefs(&forest, &columns(d, 30, s), &names, &bases).unwrap();
            b.validate().unwrap();
        }
    }

    #[test]
    fn three_variables_use_one_context() {
        let (forest, bases) = setup();
        let cols = columns(3, 25, 9);
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let b = pairwise_beliefs(&forest, &cols, &names, &bases).unwrap();
        let feature = |i: usize, j: usize, k: usize| {
            crate::embedding::featurize_triplet(&cols[i], &cols[j], &cols[k], &bases).unwrap().to_vec()
        };
        let p01 = forest.predict_proba(&feature(0, 1, 2)).unwrap();
        let p10 = forest.predict_proba(&feature(1, 0, 2)).unwrap();
        // classes are [-1, 0, 1]
        assert_eq!(b.forward[0][1], 0.5 * (p01[2] + p10[0]));
        assert_eq!(b.independent[0][1], 0.5 * (p01[1] + p10[1]));
    }

    #[test]
    fn rejects_two_variables() {
        let (forest, bases) = setup();
        let names: Vec<String> = vec!["a".into(), "b".into()];
        assert!(pairwise_beliefs(&forest, &columns(2, 10, 1), &names, &bases).is_err());
    }
}
