use rand::seq::SliceRandom;

use crate::error::{invalid, Result};
use crate::seed;

use super::{argmax, Dataset, Forest, ForestConfig};

/// Tree counts searched by default.
pub const DEFAULT_TREE_GRID: [usize; 5] = [100, 250, 500, 1000, 5000];

#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub best: usize,
    /// Pooled out-of-fold accuracy for each grid entry, in grid order.
    pub accuracies: Vec<f64>,
}

/// Stratified k-fold selection of the number of trees.
///
/// One forest with `max(grid)` trees is trained per fold; smaller ensembles
/// are its prefixes. Ties go to the smallest tree count.
pub fn cv_select_num_trees(
    data: &Dataset,
    grid: &[usize],
    folds: usize,
    seed: u64,
    config: ForestConfig,
) -> Result<CvOutcome> {
    if grid.is_empty() || grid.contains(&0) {
        return invalid("tree grid must be nonempty and positive");
    }
    if folds < 2 {
        return invalid("cross-validation needs at least two folds");
    }
    if data.len() < folds {
        return invalid(format!("{} samples cannot fill {folds} folds", data.len()));
    }
    if grid.len() == 1 {
        return Ok(CvOutcome { best: grid[0], accuracies: vec![f64::NAN] });
    }
    let assignment = stratified_folds(data, folds, seed);
    let max_trees = *grid.iter().max().expect("nonempty");
    let mut correct = vec![0usize; grid.len()];
    for fold in 0..folds {
        let train: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] != fold).collect();
        let test: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] == fold).collect();
        let forest = Forest::train(&data.subset(&train)?, max_trees, seed::derive(seed, fold as u64), config)?;
        for &i in &test {
            let x = data.row(i);
            let mut acc = vec![0.0; forest.classes().len()];
            let mut grown = 0;
            // visit grid entries by increasing tree count
            let mut order: Vec<usize> = (0..grid.len()).collect();
            order.sort_by_key(|&g| grid[g]);
            for g in order {
                while grown < grid[g] {
                    forest.trees()[grown].add_frequencies(x, &mut acc);
                    grown += 1;
                }
                if forest.classes()[argmax(&acc)] == data.labels()[i] {
                    correct[g] += 1;
                }
            }
        }
    }
    let accuracies: Vec<f64> = correct.iter().map(|&c| c as f64 / data.len() as f64).collect();
    let mut best = 0;
    for g in 1..grid.len() {
        if accuracies[g] > accuracies[best] || (accuracies[g] == accuracies[best] && grid[g] < grid[best]) {
            best = g;
        }
    }
    Ok(CvOutcome { best: grid[best], accuracies })
}

/// Fold index per row; each class is shuffled and dealt round-robin.
fn stratified_folds(data: &Dataset, folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed::derive_named(seed, "cv-folds"));
    let mut assignment = vec![0; data.len()];
    let mut next = 0;
    for class in data.classes() {
        let mut members: Vec<usize> = (0..data.len()).filter(|&i| data.labels()[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable(n: usize) -> Dataset {
        // classes separated by a wide gap on the first feature
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let shift = if i < n / 2 { 0.0 } else { 1000.0 };
                vec![shift + (i % 7) as f64, (i % 3) as f64]
            })
            .collect();
        let labels = (0..n).map(|i| if i < n / 2 { 0 } else { 1 }).collect();
        Dataset::from_rows(&rows, labels).unwrap()
    }

    #[test]
    fn singleton_grid() {
        let out = cv_select_num_trees(&separable(10), &[7], 2, 0, ForestConfig::default()).unwrap();
        assert_eq!(out.best, 7);
    }

    #[test]
    fn separable_ties_pick_smallest() {
        let data = separable(40);
        let out = cv_select_num_trees(&data, &[25, 5, 10], 5, 1, ForestConfig::default()).unwrap();
        assert_eq!(out.accuracies, vec![1.0, 1.0, 1.0]);
        assert_eq!(out.best, 5);
    }

    #[test]
    fn folds_are_stratified() {
        let data = separable(20);
        let a = stratified_folds(&data, 5, 3);
        for f in 0..5 {
            let members: Vec<usize> = (0..20).filter(|&i| a[i] == f).collect();
            assert_eq!(members.len(), 4);
            assert_eq!(members.iter().filter(|&&i| data.labels()[i] == 0).count(), 2);
        }
    }

    #[test]
    fn errors() {
        let data = separable(3);
        assert!(cv_select_num_trees(&data, &[10], 5, 0, ForestConfig::default()).is_err());
        assert!(cv_select_num_trees(&data, &[], 2, 0, ForestConfig::default()).is_err());
        assert!(cv_select_num_trees(&data, &[10], 1, 0, ForestConfig::default()).is_err());
    }
}
