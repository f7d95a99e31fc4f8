//! Per-example prediction sets and their CSV file format.
//!
//! A prediction set holds, for every example id, a probability vector
//! over the level's canonical class list plus an output label. For
//! model-produced sets the label is the argmax of the probabilities
//! (ties toward the earlier class); majority-vote outputs may carry a
//! voted label that differs from the argmax of the averaged
//! probabilities, so the label column — not the argmax — is
//! authoritative when a file is loaded.
//!
//! File format: UTF-8 CSV with header `rewire_id,label` followed by one
//! `prob_<class-key>` column per class in canonical order. Probabilities
//! are written in Rust's shortest round-trip notation, so writing and
//! re-reading a file reproduces every f64 bit-exactly.

use crate::error::{Error, Result};
use crate::model::ProbabilityVector;
use crate::taxonomy::{parse_label, Label, TaskLevel, Taxonomy};
use std::collections::HashSet;
use std::path::Path;

/// Aligned per-example predictions from one model (or one ensemble).
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    model_id: String,
    level: TaskLevel,
    class_list: Vec<Label>,
    ids: Vec<String>,
    labels: Vec<usize>,
    probs: Vec<ProbabilityVector>,
}

impl PredictionSet {
    /// Builds a set over the canonical class list of `level`. `labels`
    /// are indices into that list, parallel with `ids` and `probs`.
    pub fn new(
        model_id: String,
        level: TaskLevel,
        ids: Vec<String>,
        labels: Vec<usize>,
        probs: Vec<ProbabilityVector>,
    ) -> Result<Self> {
        let class_list = Taxonomy::class_list(level);
        if ids.len() != labels.len() || ids.len() != probs.len() {
            return Err(Error::Misaligned(format!(
                "{} ids, {} labels, {} probability rows",
                ids.len(),
                labels.len(),
                probs.len()
            )));
        }
        let mut seen = HashSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        for &l in &labels {
            if l >= class_list.len() {
                return Err(Error::InvalidConfig(format!(
                    "label index {l} out of range for {} classes",
                    class_list.len()
                )));
            }
        }
        for p in &probs {
            if p.len() != class_list.len() {
                return Err(Error::DimensionMismatch {
                    expected: class_list.len(),
                    got: p.len(),
                });
            }
        }
        Ok(Self {
            model_id,
            level,
            class_list,
            ids,
            labels,
            probs,
        })
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn with_model_id(mut self, model_id: impl Into<String>) -> Self {
        self.model_id = model_id.into();
        self
    }

    pub fn level(&self) -> TaskLevel {
        self.level
    }

    pub fn class_list(&self) -> &[Label] {
        &self.class_list
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn label_index(&self, example: usize) -> usize {
        self.labels[example]
    }

    pub fn label(&self, example: usize) -> Label {
        self.class_list[self.labels[example]]
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.labels.iter().map(|&l| self.class_list[l])
    }

    pub fn probs(&self, example: usize) -> &ProbabilityVector {
        &self.probs[example]
    }

    /// Writes the prediction CSV. Deterministic: the same set always
    /// produces byte-identical files.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["rewire_id".to_string(), "label".to_string()];
        header.extend(self.class_list.iter().map(|c| format!("prob_{}", c.key())));
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut record = vec![self.ids[i].clone(), self.label(i).render()];
            record.extend(self.probs[i].probs().iter().map(|p| format!("{p}")));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a prediction CSV written by [`write_csv`]. The header must
    /// match the canonical column sequence for `level` exactly.
    pub fn read_csv(path: &Path, level: TaskLevel, model_id: &str) -> Result<Self> {
        let class_list = Taxonomy::class_list(level);
        let mut reader = csv::ReaderBuilder::new().from_path(path)?;
        let mut expected = vec!["rewire_id".to_string(), "label".to_string()];
        expected.extend(class_list.iter().map(|c| format!("prob_{}", c.key())));
        let headers = reader.headers()?;
        if headers.iter().ne(expected.iter().map(String::as_str)) {
            return Err(Error::MalformedRow {
                line: 1,
                reason: format!(
                    "header {:?} does not match the level-{level} prediction format",
                    headers.iter().collect::<Vec<_>>()
                ),
            });
        }
        let mut ids = Vec::new();
        let mut labels = Vec::new();
        let mut probs = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != expected.len() {
                return Err(Error::MalformedRow {
                    line,
                    reason: format!("expected {} columns, found {}", expected.len(), record.len()),
                });
            }
            ids.push(record[0].to_string());
            let label = parse_label(&record[1], level)?;
            labels.push(
                class_list
                    .iter()
                    .position(|c| *c == label)
                    .expect("parse_label returns labels from the canonical list"),
            );
            let mut row = Vec::with_capacity(class_list.len());
            for (col, field) in record.iter().skip(2).enumerate() {
                let value: f64 = field.parse().map_err(|_| Error::MalformedRow {
                    line,
                    reason: format!("bad probability {:?} in column {}", field, col + 2),
                })?;
                row.push(value);
            }
            let p = ProbabilityVector::new(row).map_err(|e| Error::MalformedRow {
                line,
                reason: e.to_string(),
            })?;
            probs.push(p);
        }
        Self::new(model_id.to_string(), level, ids, labels, probs)
    }
}

/// Verifies that prediction sets agree on level (hence class list) and on
/// the exact id sequence.
pub fn check_aligned(sets: &[PredictionSet]) -> Result<()> {
    let Some(first) = sets.first() else {
        return Err(Error::Misaligned("no prediction sets given".into()));
    };
    for s in &sets[1..] {
        if s.level != first.level {
            return Err(Error::Misaligned(format!(
                "levels differ: {} ({}) vs {} ({})",
                first.model_id, first.level, s.model_id, s.level
            )));
        }
        if s.ids != first.ids {
            return Err(Error::Misaligned(format!(
                "id sequences differ between {} and {}",
                first.model_id, s.model_id
            )));
        }
    }
    Ok(())
}
