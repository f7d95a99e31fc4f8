//! Evaluation: confusion matrices, per-class precision/recall/F1,
//! accuracy, macro F1, and hierarchical-consistency counting.
//!
//! Macro F1 — the primary metric throughout — is the unweighted mean of
//! per-class F1 over the *full* canonical class list, including classes
//! with zero support, matching fixed-label-set shared-task scoring.
//! Every 0/0 is defined as 0.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::predictions::PredictionSet;
use crate::taxonomy::{
    check_consistency, CategoryLabel, Label, TaskALabel, TaskLevel, Taxonomy, VectorLabel,
};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;

/// Row-major counts with rows = truth, columns = predicted, ordered by
/// the canonical class list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    class_list: Vec<Label>,
    counts: Vec<usize>,
}

impl ConfusionMatrix {
    pub fn class_list(&self) -> &[Label] {
        &self.class_list
    }

    pub fn n_classes(&self) -> usize {
        self.class_list.len()
    }

    /// Count of examples with truth row `i` predicted as column `j`.
    pub fn at(&self, truth: usize, predicted: usize) -> usize {
        self.counts[truth * self.class_list.len() + predicted]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.counts.chunks(self.class_list.len())
    }
}

/// Tallies truth/prediction pairs into a confusion matrix over the
/// canonical class list of `level`.
pub fn confusion_matrix(
    truth: &[Label],
    predicted: &[Label],
    level: TaskLevel,
) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            truth: truth.len(),
            predicted: predicted.len(),
        });
    }
    let class_list = Taxonomy::class_list(level);
    let index_of = |label: &Label| -> Result<usize> {
        class_list
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| Error::UnknownLabel {
                raw: label.render(),
                level,
            })
    };
    let k = class_list.len();
    let mut counts = vec![0usize; k * k];
    for (t, p) in truth.iter().zip(predicted) {
        counts[index_of(t)? * k + index_of(p)?] += 1;
    }
    Ok(ConfusionMatrix { class_list, counts })
}

fn safe_div(numerator: f64, denominator: f64) -> f64 {
    if denominator == 0.0 {
        0.0
    } else {
        numerator / denominator
    }
}

/// Precision/recall/F1 and support for one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// The full evaluation report for one prediction set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub per_class: Vec<ClassMetrics>,
    pub macro_f1: f64,
    pub accuracy: f64,
    pub total: usize,
}

impl MetricsReport {
    /// An aligned plain-text rendering for terminals and logs.
    pub fn to_table(&self) -> String {
        let width = self
            .per_class
            .iter()
            .map(|c| c.label.len())
            .chain(["label".len()])
            .max()
            .unwrap_or(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>9}  {:>9}  {:>7}",
            "label", "precision", "recall", "f1", "support"
        );
        for c in &self.per_class {
            let _ = writeln!(
                out,
                "{:<width$}  {:>9.4}  {:>9.4}  {:>9.4}  {:>7}",
                c.label, c.precision, c.recall, c.f1, c.support
            );
        }
        let _ = writeln!(
            out,
            "macro_f1 {:.4}  accuracy {:.4}  total {}",
            self.macro_f1, self.accuracy, self.total
        );
        out
    }
}

/// Derives the metric report from a confusion matrix: per class,
/// P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R); macro F1 averages F1
/// over every class in the list; accuracy = trace/total.
pub fn metrics(cm: &ConfusionMatrix) -> MetricsReport {
    let k = cm.n_classes();
    let mut per_class = Vec::with_capacity(k);
    let mut f1_sum = 0.0;
    let mut trace = 0usize;
    for c in 0..k {
        let tp = cm.at(c, c);
        let fp: usize = (0..k).filter(|&i| i != c).map(|i| cm.at(i, c)).sum();
        let fn_: usize = (0..k).filter(|&j| j != c).map(|j| cm.at(c, j)).sum();
        let support = tp + fn_;
        let precision = safe_div(tp as f64, (tp + fp) as f64);
        let recall = safe_div(tp as f64, support as f64);
        let f1 = safe_div(2.0 * precision * recall, precision + recall);
        f1_sum += f1;
        trace += tp;
        per_class.push(ClassMetrics {
            label: cm.class_list[c].render(),
            precision,
            recall,
            f1,
            support,
        });
    }
    let total = cm.total();
    MetricsReport {
        per_class,
        macro_f1: f1_sum / k as f64,
        accuracy: safe_div(trace as f64, total as f64),
        total,
    }
}

/// Scores a prediction set against gold labels, requiring the id
/// sequences to match exactly.
pub fn evaluate_run(pred: &PredictionSet, truth: &Dataset) -> Result<MetricsReport> {
    if pred.level() != truth.level() {
        return Err(Error::Misaligned(format!(
            "prediction level {} vs dataset level {}",
            pred.level(),
            truth.level()
        )));
    }
    if pred.ids().iter().map(String::as_str).ne(truth.ids()) {
        return Err(Error::Misaligned(
            "prediction ids do not match the dataset id sequence".into(),
        ));
    }
    let predicted: Vec<Label> = pred.labels().collect();
    let cm = confusion_matrix(&truth.labels(), &predicted, truth.level())?;
    Ok(metrics(&cm))
}

/// Counts examples whose predictions across levels break the hierarchy.
///
/// For every id appearing in any supplied set, a violation is counted
/// when the binary prediction says not-sexist yet a category or vector
/// prediction exists for that id, or when a vector prediction's parent
/// category disagrees with the category prediction (the category set, if
/// supplied, must cover every vector-predicted id).
pub fn hierarchy_violations(
    a: Option<&PredictionSet>,
    b: Option<&PredictionSet>,
    c: Option<&PredictionSet>,
) -> usize {
    fn labels_by_id(set: Option<&PredictionSet>) -> HashMap<&str, Label> {
        set.map(|s| {
            s.ids()
                .iter()
                .enumerate()
                .map(|(i, id)| (id.as_str(), s.label(i)))
                .collect()
        })
        .unwrap_or_default()
    }
    let a_of = labels_by_id(a);
    let b_of = labels_by_id(b);
    let c_of = labels_by_id(c);
    let mut all_ids: Vec<&str> = a_of
        .keys()
        .chain(b_of.keys())
        .chain(c_of.keys())
        .copied()
        .collect();
    all_ids.sort_unstable();
    all_ids.dedup();

    let mut violations = 0;
    for id in all_ids {
        let a_label: Option<TaskALabel> = a_of.get(id).and_then(Label::as_a);
        let b_label: Option<CategoryLabel> = b_of.get(id).and_then(Label::as_b);
        let c_label: Option<VectorLabel> = c_of.get(id).and_then(Label::as_c);
        let violated = match a_label {
            Some(a) => !check_consistency(a, b_label, c_label).is_consistent(),
            // Without a binary prediction, only the vector/category
            // relation is checkable — and only when a category set was
            // supplied at all.
            None => match (c_label, b.is_some()) {
                (Some(v), true) => b_label != Some(v.parent()),
                _ => false,
            },
        };
        if violated {
            violations += 1;
        }
    }
    violations
}
