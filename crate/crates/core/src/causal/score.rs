use crate::embedding::{featurize_pair, PairBases};
use crate::error::{invalid, Error, Result};
use crate::forest::Forest;
use crate::synthgen::CauseEffectSample;

/// Antisymmetric causation coefficient in `[−1, 1]`; positive means X→Y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausationScore {
    pub value: f64,
}

impl CausationScore {
    /// `sign(value)`, with `0` meaning the score abstains.
    pub fn label(&self) -> i32 {
        if self.value > 0.0 {
            1
        } else if self.value < 0.0 {
            -1
        } else {
            0
        }
    }

    pub fn confidence(&self) -> f64 {
        self.value.abs()
    }
}

/// `P(+1 | ν(x, y)) − P(+1 | ν(y, x))` under a pair classifier.
pub fn rcc_score(model: &Forest, sample: &CauseEffectSample, bases: &PairBases) -> Result<CausationScore> {
    if model.n_features() != bases.feature_len() {
        return Err(Error::DimensionMismatch { expected: model.n_features(), got: bases.feature_len() });
    }
    let forward = featurize_pair(&sample.x, &sample.y, bases)?.to_vec();
    let backward = featurize_pair(&sample.y, &sample.x, bases)?.to_vec();
    let p_forward = model.class_probability(&forward, 1)?;
    let p_backward = model.class_probability(&backward, 1)?;
    Ok(CausationScore { value: p_forward - p_backward })
}

/// Accuracy among the most confident decisions, as a function of the fraction decided.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRateCurve {
    /// `(rate, accuracy)` at rates `k/N`, `k = 1..=N`.
    pub points: Vec<(f64, f64)>,
}

impl DecisionRateCurve {
    /// Accuracy among the `⌈rate·N⌉` most confident pairs.
    pub fn accuracy_at(&self, rate: f64) -> f64 {
        let n = self.points.len();
        let k = ((rate * n as f64).ceil() as usize).clamp(1, n);
        self.points[k - 1].1
    }

    /// Accuracy over all pairs.
    pub fn overall(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }
}

/// Sorts pairs by `|score|` (stable, so ties keep input order) and reports
/// running accuracy. An abstaining score (`0`) counts as a wrong decision.
pub fn decision_rate_curve(scores: &[CausationScore], truths: &[i32]) -> Result<DecisionRateCurve> {
    if scores.len() != truths.len() {
        return invalid(format!("{} scores but {} labels", scores.len(), truths.len()));
    }
    if scores.is_empty() {
        return invalid("decision-rate curve needs at least one pair");
    }
    if truths.iter().any(|t| *t != 1 && *t != -1) {
        return invalid("ground-truth directions must be +1 or -1");
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].confidence().total_cmp(&scores[a].confidence()));
    let n = scores.len();
    let mut correct = 0usize;
    let points = order
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            if scores[i].label() == truths[i] {
                correct += 1;
            }
            ((k + 1) as f64 / n as f64, correct as f64 / (k + 1) as f64)
        })
        .collect();
    Ok(DecisionRateCurve { points })
}
