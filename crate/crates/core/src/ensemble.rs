//! Prediction fusion: hard majority voting and probability-space
//! weighted averaging with grid-searched weights.
//!
//! Voting ties are unspecified in most formulations, so the rule here is
//! fixed and member-order-independent: among the labels with the most
//! votes, take the one with the highest probability mass summed across
//! members; if that still ties, the earliest label in the canonical class
//! order wins. All cross-member sums are accumulated in value-sorted
//! order, so reordering the member list changes nothing, bit for bit.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::eval::evaluate_run;
use crate::model::ProbabilityVector;
use crate::predictions::{check_aligned, PredictionSet};

/// Per-member ensemble weights: nonnegative, summing to 1 within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidConfig("empty weight vector".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig(
                "ensemble weights must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "ensemble weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self(weights))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Sums values in ascending order, making the result independent of the
/// caller's ordering.
fn ordered_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

/// Hard voting over at least two aligned prediction sets.
///
/// Output labels come from the vote; output probabilities are the
/// unweighted member means (informational — the voted label may differ
/// from their argmax).
pub fn majority_vote(preds: &[PredictionSet]) -> Result<PredictionSet> {
    if preds.len() < 2 {
        return Err(Error::Misaligned(format!(
            "majority vote needs at least 2 prediction sets, got {}",
            preds.len()
        )));
    }
    check_aligned(preds)?;
    let first = &preds[0];
    let k = first.class_list().len();
    let m = preds.len();
    let mut labels = Vec::with_capacity(first.len());
    let mut probs = Vec::with_capacity(first.len());
    for i in 0..first.len() {
        let mut votes = vec![0usize; k];
        for p in preds {
            votes[p.label_index(i)] += 1;
        }
        let top = *votes.iter().max().expect("k >= 1");
        let mut winner: Option<(usize, f64)> = None;
        for (class, &v) in votes.iter().enumerate() {
            if v != top {
                continue;
            }
            let mass = ordered_sum(preds.iter().map(|p| p.probs(i).probs()[class]).collect());
            // Strict comparison keeps the earliest class on equal mass.
            if winner.map_or(true, |(_, best)| mass > best) {
                winner = Some((class, mass));
            }
        }
        labels.push(winner.expect("some class has the top vote count").0);
        let mean: Vec<f64> = (0..k)
            .map(|class| {
                ordered_sum(preds.iter().map(|p| p.probs(i).probs()[class]).collect())
                    / m as f64
            })
            .collect();
        probs.push(ProbabilityVector::new(mean)?);
    }
    PredictionSet::new(
        "majority_vote".into(),
        first.level(),
        first.ids().to_vec(),
        labels,
        probs,
    )
}

/// Convex combination of member probabilities; labels are the argmax of
/// the combined distribution.
pub fn weighted_average(preds: &[PredictionSet], w: &WeightVector) -> Result<PredictionSet> {
    if w.len() != preds.len() {
        return Err(Error::WeightLengthMismatch {
            expected: preds.len(),
            got: w.len(),
        });
    }
    check_aligned(preds)?;
    let first = &preds[0];
    let k = first.class_list().len();
    let mut labels = Vec::with_capacity(first.len());
    let mut probs = Vec::with_capacity(first.len());
    for i in 0..first.len() {
        let mut combined = vec![0.0f64; k];
        for (p, &weight) in preds.iter().zip(w.weights()) {
            for (class, &value) in p.probs(i).probs().iter().enumerate() {
                combined[class] += weight * value;
            }
        }
        let p = ProbabilityVector::new(combined)?;
        labels.push(p.argmax());
        probs.push(p);
    }
    PredictionSet::new(
        "weighted_average".into(),
        first.level(),
        first.ids().to_vec(),
        labels,
        probs,
    )
}

/// All weight vectors on the m-member simplex with coordinates in
/// multiples of `step`, in lexicographic order. The simplex vertices are
/// always included.
pub fn simplex_grid(step: f64, members: usize) -> Result<Vec<Vec<f64>>> {
    if !step.is_finite() || step <= 0.0 || step > 1.0 {
        return Err(Error::InvalidStep(step));
    }
    let divisions = (1.0 / step).round();
    if (divisions * step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidStep(step));
    }
    let divisions = divisions as usize;
    if members == 0 {
        return Err(Error::InvalidConfig("no ensemble members".into()));
    }
    let mut grid = Vec::new();
    let mut current = vec![0usize; members];
    fn recurse(
        grid: &mut Vec<Vec<f64>>,
        current: &mut Vec<usize>,
        part: usize,
        remaining: usize,
        divisions: usize,
    ) {
        if part + 1 == current.len() {
            current[part] = remaining;
            grid.push(current.iter().map(|&c| c as f64 / divisions as f64).collect());
            return;
        }
        for c in 0..=remaining {
            current[part] = c;
            recurse(grid, current, part + 1, remaining - c, divisions);
        }
    }
    recurse(&mut grid, &mut current, 0, divisions, divisions);
    Ok(grid)
}

/// Exhaustively scores every grid weight vector by the macro F1 of its
/// weighted average against `truth`, returning the best; equal scores go
/// to the lexicographically smallest weights.
pub fn grid_search_weights(
    preds: &[PredictionSet],
    truth: &Dataset,
    step: f64,
) -> Result<(WeightVector, f64)> {
    if preds.is_empty() || preds.len() > 5 {
        return Err(Error::InvalidConfig(format!(
            "grid search supports 1 to 5 members, got {}",
            preds.len()
        )));
    }
    check_aligned(preds)?;
    let mut best: Option<(WeightVector, f64)> = None;
    for candidate in simplex_grid(step, preds.len())? {
        let w = WeightVector::new(candidate)?;
        let fused = weighted_average(preds, &w)?;
        let score = evaluate_run(&fused, truth)?.macro_f1;
        // Strict improvement only: the first (lexicographically smallest)
        // vector of any score is kept.
        if best.as_ref().map_or(true, |(_, b)| score > *b) {
            best = Some((w, score));
        }
    }
    Ok(best.expect("the grid is never empty"))
}
