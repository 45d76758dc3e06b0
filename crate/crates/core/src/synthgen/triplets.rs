use crate::error::{invalid, Result};
use crate::seed;

use super::pairs::{sample_cause, sample_mechanism, sample_noise, standardize, MotherParams};

/// Number of DAGs in the three-variable training family.
pub const DAG_COUNT: usize = 8;

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

const DAG_EDGES: [&[(usize, usize)]; DAG_COUNT] = [
    &[],
    &[(X, Y)],
    &[(X, Y), (Y, Z)],
    &[(X, Y), (Z, Y)],
    &[(Y, X), (Y, Z)],
    &[(X, Y), (Y, Z), (X, Z)],
    &[(X, Y), (Z, Y), (X, Z)],
    &[(Y, X), (Y, Z), (X, Z)],
];

/// One of the eight DAGs on `{X=0, Y=1, Z=2}`:
///
/// | id | edges |
/// |----|-------|
/// | 0 | none |
/// | 1 | X→Y |
/// | 2 | X→Y, Y→Z |
/// | 3 | X→Y, Z→Y |
/// | 4 | Y→X, Y→Z |
/// | 5 | X→Y, Y→Z, X→Z |
/// | 6 | X→Y, Z→Y, X→Z |
/// | 7 | Y→X, Y→Z, X→Z |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DagSpec {
    id: usize,
}

impl DagSpec {
    pub fn new(id: usize) -> Result<Self> {
        if id >= DAG_COUNT {
            return invalid(format!("DAG id {id} out of range 0..{DAG_COUNT}"));
        }
        Ok(Self { id })
    }

    pub fn all() -> impl Iterator<Item = DagSpec> {
        (0..DAG_COUNT).map(|id| DagSpec { id })
    }

    /// Looks up the family member with exactly this edge set.
    pub fn from_edges(edges: &[(usize, usize)]) -> Option<Self> {
        let mut want = edges.to_vec();
        want.sort_unstable();
        Self::all().find(|d| {
            let mut have = d.edges().to_vec();
            have.sort_unstable();
            have == want
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn edges(&self) -> &'static [(usize, usize)] {
        DAG_EDGES[self.id]
    }

    pub fn parents(&self, v: usize) -> Vec<usize> {
        let mut p: Vec<usize> = self.edges().iter().filter(|e| e.1 == v).map(|e| e.0).collect();
        p.sort_unstable();
        p
    }

    /// `+1` if `u → v`, `−1` if `v → u`, `0` otherwise.
    pub fn relation(&self, u: usize, v: usize) -> i32 {
        if self.edges().contains(&(u, v)) {
            1
        } else if self.edges().contains(&(v, u)) {
            -1
        } else {
            0
        }
    }

    /// `(l1, l2, l3)` for the pairs `(X, Y)`, `(Y, Z)` and `(X, Z)`.
    pub fn labels(&self) -> [i32; 3] {
        [self.relation(X, Y), self.relation(Y, Z), self.relation(X, Z)]
    }

    /// Vertices ordered so that every parent precedes its children.
    pub fn topological_order(&self) -> [usize; 3] {
        let mut order = [0; 3];
        let mut placed = [false; 3];
        for slot in &mut order {
            let v = (0..3)
                .find(|&v| !placed[v] && self.parents(v).iter().all(|&p| placed[p]))
                .expect("family members are acyclic");
            placed[v] = true;
            *slot = v;
        }
        order
    }
}

/// A three-variable sample with its generating DAG and pair labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletSample {
    pub columns: [Vec<f64>; 3],
    pub labels: [i32; 3],
    pub dag: DagSpec,
}

impl TripletSample {
    pub fn x(&self) -> &[f64] {
        &self.columns[X]
    }

    pub fn y(&self) -> &[f64] {
        &self.columns[Y]
    }

    pub fn z(&self) -> &[f64] {
        &self.columns[Z]
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns[0].is_empty()
    }
}

/// Samples `(X, Y, Z)` from `dag`: roots are mixture causes, each child is the
/// sum of one random spline per parent plus noise, and every column is standardized.
pub fn sample_triplet(theta: &MotherParams, dag: DagSpec, n: usize, seed: u64) -> Result<TripletSample> {
    theta.validate()?;
    if n < 2 {
        return invalid("a triplet sample needs at least two observations");
    }
    let mut rng = seed::rng(seed);
    let mut columns: [Vec<f64>; 3] = Default::default();
    for v in dag.topological_order() {
        let parents = dag.parents(v);
        if parents.is_empty() {
            columns[v] = sample_cause(theta, n, &mut rng);
            continue;
        }
        let mut child = sample_noise(theta, n, &mut rng);
        for p in parents {
            let f = sample_mechanism(theta, &columns[p], &mut rng);
            for (c, x) in child.iter_mut().zip(&columns[p]) {
                *c += f.eval(*x);
            }
        }
        standardize(&mut child);
        columns[v] = child;
    }
    Ok(TripletSample { columns, labels: dag.labels(), dag })
}
