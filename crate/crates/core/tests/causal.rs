use proptest::prelude::*;
use rcc_core::causal::{decision_rate_curve, infer_dag, CausationScore, EdgeBeliefs};
use rcc_core::forest::ForestConfig;
use rcc_core::pipeline::{PairModel, TrainingConfig, TreeCount, TripletModel};
use rcc_core::seed;
use rcc_core::synthgen::{sample_pair, sample_triplet, DagSpec, MotherParams};
use rand::Rng as _;

fn theta() -> MotherParams {
    MotherParams::new(3, 2.0, 2.0, 2.0, 5).unwrap()
}

fn names(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("V{i}")).collect()
}

/// Random beliefs: a uniform point of the 3-simplex per unordered pair.
fn random_beliefs(d: usize, s: u64) -> EdgeBeliefs {
    let mut rng = seed::rng(s);
    let mut table = vec![vec![(0.0, 0.0); d]; d];
    for (i, row) in table.iter_mut().enumerate() {
        for cell in &mut row[i + 1..] {
            let (u, v): (f64, f64) = (rng.random(), rng.random());
            let (lo, hi) = if u < v { (u, v) } else { (v, u) };
            *cell = (lo, hi - lo);
        }
    }
    let fwd = |i: usize, j: usize| if i < j { table[i][j].0 } else { table[j][i].1 };
    let ind = |i: usize, j: usize| {
        let (a, b) = table[i.min(j)][i.max(j)];
        1.0 - (a + b)
    };
    EdgeBeliefs::from_forward_independent(names(d), fwd, ind).unwrap()
}

#[test]
fn inferred_graphs_are_acyclic() {
    for s in 0..1000u64 {
        let d = 3 + (s % 6) as usize;
        let dag = infer_dag(&random_beliefs(d, s));
        assert!(dag.topological_order().is_some(), "seed {s}");
        let beliefs = random_beliefs(d, s);
        for e in dag.edges() {
            let (f, o, b) = (beliefs.forward[e.from][e.to], beliefs.independent[e.from][e.to], beliefs.backward[e.from][e.to]);
            assert!(f > o && f > b && e.confidence == f);
        }
    }
}

proptest! {
    #[test]
    fn decision_rates_increase_to_one(values in prop::collection::vec(-1.0f64..1.0, 1..60), flips in any::<u64>()) {
        let truths: Vec<i32> = (0..values.len()).map(|i| if (flips >> (i % 64)) & 1 == 1 { 1 } else { -1 }).collect();
        let scores: Vec<CausationScore> = values.iter().map(|&value| CausationScore { value }).collect();
        let curve = decision_rate_curve(&scores, &truths).unwrap();
        prop_assert!(curve.points.windows(2).all(|w| w[0].0 < w[1].0));
        prop_assert_eq!(curve.points.last().unwrap().0, 1.0);
        let correct = scores.iter().zip(&truths).filter(|(s, t)| s.label() == **t).count();
        prop_assert_eq!(curve.accuracy_at(1.0), correct as f64 / values.len() as f64);
    }
}

#[test]
fn pair_scores_are_antisymmetric_and_bounded() {
    let config = TrainingConfig {
        theta: theta(),
        big_n: 80,
        n: 100,
        m: 24,
        trees: TreeCount::Fixed(25),
        forest: ForestConfig::default(),
        seed: 3,
    };
    let model = PairModel::train(&config).unwrap();
    let again = PairModel::train(&config).unwrap();
    assert_eq!(model, again);
    for i in 0..40 {
        let s = sample_pair(&theta(), 100, seed::derive(31, i)).unwrap();
        let forward = model.score(&s).unwrap().value;
        assert_eq!(forward + model.score(&s.swapped()).unwrap().value, 0.0);
        assert!((-1.0..=1.0).contains(&forward));
        assert_eq!(forward, again.score(&s).unwrap().value);
    }
    let s = sample_pair(&theta(), 100, 5).unwrap();
    let diagonal = rcc_core::synthgen::CauseEffectSample::new(s.x.clone(), s.x.clone()).unwrap();
    assert_eq!(model.score(&diagonal).unwrap().value, 0.0);
}

#[test]
fn chain_beliefs_favour_the_true_direction() {
    let config = TrainingConfig {
        theta: theta(),
        big_n: 600,
        n: 300,
        m: 100,
        trees: TreeCount::Fixed(100),
        forest: ForestConfig::default(),
        seed: 12,
    };
    let model = TripletModel::train(&config).unwrap();
    let chain = DagSpec::from_edges(&[(0, 1), (1, 2)]).unwrap();
    let labels = names(3);
    let mut hits = 0;
    for r in 0..100u64 {
        let t = sample_triplet(&theta(), chain, 300, seed::derive(13, r)).unwrap();
        let b = model.beliefs(&t.columns, &labels).unwrap();
        b.validate().unwrap();
        if b.forward[0][1] > b.independent[0][1] && b.forward[0][1] > b.backward[0][1] {
            hits += 1;
        }
    }
    assert!(hits >= 60, "forward belief largest for only {hits}/100 chain samples");
}
