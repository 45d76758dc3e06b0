use rand::Rng as _;
use rayon::prelude::*;

use crate::embedding::{
    embed_sample, Embedding, PairBases, PairFeature, PointSet, TripletBases, TripletFeature,
};
use crate::error::{invalid, Result};
use crate::seed;

use super::{sample_pair, sample_triplet, DagSpec, MotherParams, DAG_COUNT};

/// The six ordered arrangements `(u, v, w)` of `(X, Y, Z)` added per triplet,
/// labelled `+l1, +l2, +l3, −l1, −l2, −l3` in this order.
pub const TRIPLET_ARRANGEMENTS: [[usize; 3]; 6] =
    [[0, 1, 2], [1, 2, 0], [0, 2, 1], [1, 0, 2], [2, 1, 0], [2, 0, 1]];

const ARRANGEMENT_LABELS: [(usize, i32); 6] = [(0, 1), (1, 1), (2, 1), (0, -1), (1, -1), (2, -1)];

/// `2N` featurized pairs: `(ν(x, y), +1)` followed by `(ν(y, x), −1)` for each draw.
pub fn build_pair_training_set(
    theta: &MotherParams,
    big_n: usize,
    n: usize,
    bases: &PairBases,
    seed: u64,
) -> Result<Vec<(PairFeature, i32)>> {
    if big_n == 0 {
        return invalid("training set needs at least one synthetic pair");
    }
    let per_pair: Vec<[(PairFeature, i32); 2]> = (0..big_n)
        .into_par_iter()
        .map(|i| {
            let s = sample_pair(theta, n, seed::derive(seed, i as u64))?;
            let mx = embed_sample(&PointSet::scalars(&s.x), &bases.marginal)?;
            let my = embed_sample(&PointSet::scalars(&s.y), &bases.marginal)?;
            let jxy = embed_sample(&PointSet::from_columns(&[&s.x, &s.y])?, &bases.joint)?;
            let jyx = embed_sample(&PointSet::from_columns(&[&s.y, &s.x])?, &bases.joint)?;
            Ok([
                (PairFeature { marginal_x: mx.clone(), marginal_y: my.clone(), joint: jxy }, 1),
                (PairFeature { marginal_x: my, marginal_y: mx, joint: jyx }, -1),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(per_pair.into_iter().flatten().collect())
}

/// One element of the triplet training set.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletExample {
    pub feature: TripletFeature,
    pub label: i32,
    pub dag: DagSpec,
    pub arrangement: [usize; 3],
}

/// `6N` featurized arrangements of triplets drawn from DAGs chosen uniformly
/// among the eight family members.
pub fn build_triplet_training_set(
    theta: &MotherParams,
    big_n: usize,
    n: usize,
    bases: &TripletBases,
    seed: u64,
) -> Result<Vec<TripletExample>> {
    if big_n == 0 {
        return invalid("training set needs at least one synthetic triplet");
    }
    let per_triplet: Vec<Vec<TripletExample>> = (0..big_n)
        .into_par_iter()
        .map(|i| {
            let task = seed::derive(seed, i as u64);
            let dag = DagSpec::new(seed::rng(task).random_range(0..DAG_COUNT))?;
            let t = sample_triplet(theta, dag, n, seed::derive(task, 1))?;
            let marginals: Vec<Embedding> = t
                .columns
                .iter()
                .map(|c| embed_sample(&PointSet::scalars(c), &bases.marginal))
                .collect::<Result<_>>()?;
            TRIPLET_ARRANGEMENTS
                .iter()
                .zip(ARRANGEMENT_LABELS)
                .map(|(arr, (which, sign))| {
                    let [u, v, w] = *arr;
                    let joint = PointSet::from_columns(&[&t.columns[u], &t.columns[v], &t.columns[w]])?;
                    Ok(TripletExample {
                        feature: TripletFeature {
                            marginal_u: marginals[u].clone(),
                            marginal_v: marginals[v].clone(),
                            joint: embed_sample(&joint, &bases.joint)?,
                        },
                        label: sign * t.labels[which],
                        dag,
                        arrangement: *arr,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_triplet.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{featurize_pair, KernelSpec, RffBasis};

    fn theta() -> MotherParams {
        MotherParams::new(3, 2.0, 2.0, 2.0, 5).unwrap()
    }

    fn pair_bases() -> PairBases {
        let spec = KernelSpec::three_scale(0.5).unwrap();
        PairBases::new(RffBasis::draw(&spec, 1, 12, 1).unwrap(), RffBasis::draw(&spec, 2, 12, 2).unwrap())
            .unwrap()
    }

    fn triplet_bases() -> TripletBases {
        let spec = KernelSpec::three_scale(0.5).unwrap();
        TripletBases::new(RffBasis::draw(&spec, 1, 8, 1).unwrap(), RffBasis::draw(&spec, 3, 8, 3).unwrap())
            .unwrap()
    }

    #[test]
    fn pair_set_is_symmetrized() {
        let bases = pair_bases();
        let set = build_pair_training_set(&theta(), 5, 60, &bases, 9).unwrap();
        assert_eq!(set.len(), 10);
        for i in 0..5 {
            let (f, lf) = &set[2 * i];
            let (g, lg) = &set[2 * i + 1];
            assert_eq!((*lf, *lg), (1, -1));
            assert_eq!(f.marginal_x, g.marginal_y);
            assert_eq!(f.marginal_y, g.marginal_x);
            let s = sample_pair(&theta(), 60, seed::derive(9, i as u64)).unwrap();
            assert_eq!(g, &featurize_pair(&s.y, &s.x, &bases).unwrap());
        }
        assert!(build_pair_training_set(&theta(), 0, 60, &bases, 9).is_err());
    }

    #[test]
    fn triplet_set_size_and_labels() {
        let set = build_triplet_training_set(&theta(), 40, 30, &triplet_bases(), 4).unwrap();
        assert_eq!(set.len(), 240);
        for ex in &set {
            let [u, v, _] = ex.arrangement;
            assert_eq!(ex.label, ex.dag.relation(u, v));
        }
        assert!(set.iter().any(|e| e.label == 0));
        assert!(set.iter().any(|e| e.label == 1));
        assert!(set.iter().any(|e| e.label == -1));
        for chunk in set.chunks(6) {
            for k in 0..3 {
                assert_eq!(chunk[k].label, -chunk[k + 3].label);
            }
        }
    }

    #[test]
    fn deterministic() {
        let a = build_triplet_training_set(&theta(), 3, 20, &triplet_bases(), 1).unwrap();
        let b = build_triplet_training_set(&theta(), 3, 20, &triplet_bases(), 1).unwrap();
        assert_eq!(a, b);
    }
}
