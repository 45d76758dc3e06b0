use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::seed::Rng;

use super::{Dataset, ForestConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { counts: Vec<u32> },
}

/// A classification tree stored as a node arena rooted at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TreeRecord", into = "TreeRecord")]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn from_nodes(nodes: Vec<Node>) -> Self {
        Self { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn leaf(&self, x: &[f64]) -> &[u32] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split { feature, threshold, left, right } => {
                    i = if x[*feature] <= *threshold { *left } else { *right };
                }
                Node::Leaf { counts } => return counts,
            }
        }
    }

    /// Adds the normalized leaf class frequencies for `x` to `acc`.
    pub(crate) fn add_frequencies(&self, x: &[f64], acc: &mut [f64]) {
        let counts = self.leaf(x);
        let total: u32 = counts.iter().sum();
        let inv = 1.0 / total as f64;
        for (a, c) in acc.iter_mut().zip(counts) {
            *a += *c as f64 * inv;
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
                Node::Leaf { .. } => 0,
            }
        }
        go(&self.nodes, 0)
    }

    pub(crate) fn validate(&self, n_features: usize, n_classes: usize) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("empty tree".into());
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Split { feature, threshold, left, right } => {
                    if *feature >= n_features {
                        return Err(format!("node {i} splits on feature {feature} of {n_features}"));
                    }
                    if !threshold.is_finite() {
                        return Err(format!("node {i} has a non-finite threshold"));
                    }
                    // children always follow their parent, which also rules out cycles
                    if *left <= i || *right <= i || *left >= self.nodes.len() || *right >= self.nodes.len() {
                        return Err(format!("node {i} has invalid children"));
                    }
                }
                Node::Leaf { counts } => {
                    if counts.len() != n_classes || counts.iter().sum::<u32>() == 0 {
                        return Err(format!("leaf {i} has invalid class counts"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Column-oriented serialized form of a [`Tree`]. `feature[i] = -1` marks a
/// leaf; leaves' class counts are concatenated in node order.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TreeRecord {
    n_classes: usize,
    feature: Vec<i64>,
    threshold: Vec<f64>,
    left: Vec<usize>,
    right: Vec<usize>,
    leaf_counts: Vec<u32>,
}

impl From<Tree> for TreeRecord {
    fn from(tree: Tree) -> Self {
        let n_classes = tree
            .nodes
            .iter()
            .find_map(|n| match n {
                Node::Leaf { counts } => Some(counts.len()),
                _ => None,
            })
            .unwrap_or(0);
        let mut rec = TreeRecord {
            n_classes,
            feature: Vec::with_capacity(tree.nodes.len()),
            threshold: Vec::with_capacity(tree.nodes.len()),
            left: Vec::with_capacity(tree.nodes.len()),
            right: Vec::with_capacity(tree.nodes.len()),
            leaf_counts: Vec::new(),
        };
        for node in tree.nodes {
            match node {
                Node::Split { feature, threshold, left, right } => {
                    rec.feature.push(feature as i64);
                    rec.threshold.push(threshold);
                    rec.left.push(left);
                    rec.right.push(right);
                }
                Node::Leaf { counts } => {
                    rec.feature.push(-1);
                    rec.threshold.push(0.0);
                    rec.left.push(0);
                    rec.right.push(0);
                    rec.leaf_counts.extend(counts);
                }
            }
        }
        rec
    }
}

impl TryFrom<TreeRecord> for Tree {
    type Error = String;

    fn try_from(rec: TreeRecord) -> Result<Self, String> {
        let len = rec.feature.len();
        if rec.threshold.len() != len || rec.left.len() != len || rec.right.len() != len {
            return Err("tree columns have different lengths".into());
        }
        let leaves = rec.feature.iter().filter(|f| **f < 0).count();
        if rec.n_classes == 0 || rec.leaf_counts.len() != leaves * rec.n_classes {
            return Err("leaf counts do not match the leaf count".into());
        }
        let mut counts = rec.leaf_counts.chunks_exact(rec.n_classes);
        let nodes = (0..len)
            .map(|i| {
                if rec.feature[i] < 0 {
                    Node::Leaf { counts: counts.next().expect("length checked").to_vec() }
                } else {
                    Node::Split {
                        feature: rec.feature[i] as usize,
                        threshold: rec.threshold[i],
                        left: rec.left[i],
                        right: rec.right[i],
                    }
                }
            })
            .collect();
        Ok(Tree { nodes })
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    score: f64,
    feature: usize,
    threshold: f64,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        self.score < other.score
            || (self.score == other.score
                && (self.feature < other.feature
                    || (self.feature == other.feature && self.threshold < other.threshold)))
    }
}

/// `n · Gini(counts)` = `n − Σ_c count_c² / n`.
#[inline]
fn weighted_gini(counts: &[f64], n: f64) -> f64 {
    n - counts.iter().map(|c| c * c).sum::<f64>() / n
}

struct Grower<'a> {
    data: &'a Dataset,
    targets: &'a [usize],
    n_classes: usize,
    config: &'a ForestConfig,
    k_features: usize,
    features: Vec<usize>,
    buf: Vec<(f64, usize)>,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl Grower<'_> {
    fn counts(&self, rows: &[usize]) -> Vec<u32> {
        let mut c = vec![0u32; self.n_classes];
        for &r in rows {
            c[self.targets[r]] += 1;
        }
        c
    }

    fn best_split_on(&mut self, rows: &[usize], parent: &[u32], feature: usize) -> Option<Candidate> {
        let p = self.data.n_features();
        let x = &self.data.features;
        self.buf.clear();
        self.buf.extend(rows.iter().map(|&r| (x[r * p + feature], self.targets[r])));
        self.buf.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let n = self.buf.len();
        if self.buf[0].0 == self.buf[n - 1].0 {
            return None;
        }
        let min_leaf = self.config.min_samples_leaf;
        self.left.iter_mut().for_each(|c| *c = 0.0);
        for (r, c) in self.right.iter_mut().zip(parent) {
            *r = *c as f64;
        }
        let mut best: Option<Candidate> = None;
        for k in 0..n - 1 {
            let (v, class) = self.buf[k];
            self.left[class] += 1.0;
            self.right[class] -= 1.0;
            let next = self.buf[k + 1].0;
            let n_left = k + 1;
            if v == next || n_left < min_leaf || n - n_left < min_leaf {
                continue;
            }
            let score = weighted_gini(&self.left, n_left as f64) + weighted_gini(&self.right, (n - n_left) as f64);
            if best.is_none_or(|b| score < b.score) {
                best = Some(Candidate { score, feature, threshold: midpoint(v, next) });
            }
        }
        best
    }

    fn best_split(&mut self, rows: &[usize], parent: &[u32], rng: &mut Rng) -> Option<Candidate> {
        let p = self.features.len();
        let exhaustive = self.k_features >= p;
        let mut best: Option<Candidate> = None;
        for i in 0..p {
            if !exhaustive {
                let j = rng.random_range(i..p);
                self.features.swap(i, j);
            }
            let f = self.features[i];
            if let Some(c) = self.best_split_on(rows, parent, f) {
                if best.is_none_or(|b| c.beats(&b)) {
                    best = Some(c);
                }
            }
            // keep drawing past the budget only while nothing splits
            if i + 1 >= self.k_features && best.is_some() {
                break;
            }
        }
        best
    }
}

/// Threshold strictly below `hi` and at least `lo`.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid < hi {
        mid
    } else {
        lo
    }
}

pub(crate) fn grow(
    data: &Dataset,
    targets: &[usize],
    n_classes: usize,
    config: &ForestConfig,
    rng: &mut Rng,
) -> Tree {
    let n = data.len();
    let rows: Vec<usize> = if config.bootstrap {
        (0..n).map(|_| rng.random_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    let mut g = Grower {
        data,
        targets,
        n_classes,
        config,
        k_features: config.max_features.resolve(data.n_features()),
        features: (0..data.n_features()).collect(),
        buf: Vec::with_capacity(n),
        left: vec![0.0; n_classes],
        right: vec![0.0; n_classes],
    };
    let mut nodes = vec![Node::Leaf { counts: Vec::new() }];
    let mut stack = vec![(0usize, rows, 0usize)];
    while let Some((id, rows, depth)) = stack.pop() {
        let counts = g.counts(&rows);
        let pure = counts.iter().filter(|c| **c > 0).count() <= 1;
        let too_small = rows.len() < 2 * config.min_samples_leaf;
        let too_deep = config.max_depth.is_some_and(|d| depth >= d);
        let split = if pure || too_small || too_deep {
            None
        } else {
            g.best_split(&rows, &counts, rng)
        };
        match split {
            None => nodes[id] = Node::Leaf { counts },
            Some(c) => {
                let p = data.n_features();
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
                    rows.iter().partition(|&&r| data.features[r * p + c.feature] <= c.threshold);
                let left = nodes.len();
                let right = left + 1;
                nodes.push(Node::Leaf { counts: Vec::new() });
                nodes.push(Node::Leaf { counts: Vec::new() });
                nodes[id] = Node::Split { feature: c.feature, threshold: c.threshold, left, right };
                stack.push((right, right_rows, depth + 1));
                stack.push((left, left_rows, depth + 1));
            }
        }
    }
    Tree { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_stays_below_upper() {
        assert_eq!(midpoint(1.0, 3.0), 2.0);
        let lo: f64 = 1.0;
        let hi = f64::from_bits(lo.to_bits() + 1);
        assert_eq!(midpoint(lo, hi), lo);
    }

    #[test]
    fn tie_break_prefers_lower_feature_then_threshold() {
        let a = Candidate { score: 1.0, feature: 2, threshold: 0.5 };
        let b = Candidate { score: 1.0, feature: 1, threshold: 0.9 };
        let c = Candidate { score: 1.0, feature: 1, threshold: 0.1 };
        assert!(b.beats(&a));
        assert!(c.beats(&b));
        assert!(Candidate { score: 0.5, ..a }.beats(&c));
    }

    #[test]
    fn record_round_trip() {
        let tree = Tree::from_nodes(vec![
            Node::Split { feature: 1, threshold: 0.25, left: 1, right: 2 },
            Node::Leaf { counts: vec![3, 0] },
            Node::Leaf { counts: vec![1, 4] },
        ]);
        let rec: TreeRecord = tree.clone().into();
        assert_eq!(rec.feature, vec![1, -1, -1]);
        assert_eq!(Tree::try_from(rec).unwrap(), tree);
        tree.validate(2, 2).unwrap();
        assert!(tree.validate(1, 2).is_err());
    }
}
