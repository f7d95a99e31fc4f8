//! Dataset ingestion, class statistics, and stratified partitioning.
//!
//! Input files are UTF-8, RFC-4180 CSV with a header row and the columns
//! `rewire_id`, `text`, `label_sexist`, `label_category`, `label_vector`.
//! The string "none" (or an empty field) in the category/vector columns
//! marks an absent fine-grained label. Loading at level B or C keeps only
//! the rows that carry a label at that level.
//!
//! Splitting is deterministic: it is a pure function of the dataset's id
//! order and the caller's seed, using the crate's splitmix generator, so
//! the same inputs produce the same partition on every platform.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::taxonomy::{
    check_consistency, parse_label, CategoryLabel, Label, TaskALabel, TaskLevel, Taxonomy,
    VectorLabel,
};
use std::collections::HashSet;
use std::path::Path;

/// One labelled post. The fine-grained labels are optional because only
/// sexist posts carry them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub id: String,
    pub text: String,
    pub label_a: Option<TaskALabel>,
    pub label_b: Option<CategoryLabel>,
    pub label_c: Option<VectorLabel>,
}

impl Example {
    /// The example's label at the given level, if it has one.
    pub fn label_at(&self, level: TaskLevel) -> Option<Label> {
        match level {
            TaskLevel::A => self.label_a.map(Label::A),
            TaskLevel::B => self.label_b.map(Label::B),
            TaskLevel::C => self.label_c.map(Label::C),
        }
    }
}

/// An ordered collection of examples, each guaranteed to carry a label at
/// the dataset's level. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Dataset {
    level: TaskLevel,
    examples: Vec<Example>,
}

impl Dataset {
    /// Builds a dataset, enforcing the invariants: unique ids, non-empty
    /// text, a label present at `level`, and cross-level consistency for
    /// whatever labels each example carries.
    pub fn new(level: TaskLevel, examples: Vec<Example>) -> Result<Self> {
        let mut seen = HashSet::new();
        for ex in &examples {
            if !seen.insert(ex.id.clone()) {
                return Err(Error::DuplicateId(ex.id.clone()));
            }
            if ex.text.is_empty() {
                return Err(Error::EmptyText { id: ex.id.clone() });
            }
            if ex.label_at(level).is_none() {
                return Err(Error::InvalidConfig(format!(
                    "example {:?} has no label at level {level}",
                    ex.id
                )));
            }
            if let Some(a) = ex.label_a {
                let verdict = check_consistency(a, ex.label_b, ex.label_c);
                if let crate::taxonomy::ConsistencyVerdict::Inconsistent(v) = verdict {
                    return Err(Error::InconsistentLabels {
                        id: ex.id.clone(),
                        detail: v.to_string(),
                    });
                }
            }
        }
        Ok(Self { level, examples })
    }

    pub fn level(&self) -> TaskLevel {
        self.level
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.examples.iter().map(|e| e.id.as_str())
    }

    /// Labels at the dataset's level, in example order.
    pub fn labels(&self) -> Vec<Label> {
        self.examples
            .iter()
            .map(|e| {
                e.label_at(self.level)
                    .expect("dataset invariant: label present at level")
            })
            .collect()
    }

    /// A new dataset containing the examples at `indices`, in the given
    /// order. Indices must be in range and distinct.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            level: self.level,
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
        }
    }

    pub fn stats(&self) -> DatasetStats {
        DatasetStats::of(self)
    }
}

/// Per-class occurrence counts over a dataset's label column, aligned with
/// the canonical class list for the level (absent classes count zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetStats {
    pub n_samples: usize,
    pub n_classes: usize,
    pub class_list: Vec<Label>,
    pub counts: Vec<usize>,
}

impl DatasetStats {
    pub fn of(ds: &Dataset) -> Self {
        let class_list = Taxonomy::class_list(ds.level());
        let mut counts = vec![0usize; class_list.len()];
        for label in ds.labels() {
            let idx = class_list
                .iter()
                .position(|c| *c == label)
                .expect("labels come from the same taxonomy as the class list");
            counts[idx] += 1;
        }
        Self {
            n_samples: ds.len(),
            n_classes: class_list.len(),
            class_list,
            counts,
        }
    }
}

/// Balanced per-class weights: weight[c] = n_samples / (n_classes × count[c]).
///
/// Rare classes get proportionally larger weights; the identity
/// Σ_c weight[c]·count[c] = n_samples always holds.
pub fn class_weights(stats: &DatasetStats) -> Result<Vec<f64>> {
    stats
        .class_list
        .iter()
        .zip(&stats.counts)
        .map(|(label, &count)| {
            if count == 0 {
                return Err(Error::EmptyClass(label.key()));
            }
            Ok(stats.n_samples as f64 / (stats.n_classes as f64 * count as f64))
        })
        .collect()
}

/// How to carve a dataset into train and validation portions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratify: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            seed: 42,
            stratify: true,
        }
    }
}

/// Groups example indices by their label, in canonical class order.
/// Classes absent from the dataset are omitted.
fn indices_by_class(ds: &Dataset) -> Vec<(Label, Vec<usize>)> {
    let class_list = Taxonomy::class_list(ds.level());
    let labels = ds.labels();
    class_list
        .into_iter()
        .filter_map(|class| {
            let members: Vec<usize> = labels
                .iter()
                .enumerate()
                .filter(|(_, l)| **l == class)
                .map(|(i, _)| i)
                .collect();
            (!members.is_empty()).then_some((class, members))
        })
        .collect()
}

/// Splits a dataset into disjoint train and validation parts.
///
/// With stratification, each class contributes floor(fraction × count)
/// examples to train, and the remaining seats up to the global target
/// round(fraction × n) go to the classes with the largest fractional
/// remainders. Both output datasets preserve the original example order.
pub fn stratified_split(ds: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "train_fraction must be in (0,1), got {}",
            spec.train_fraction
        )));
    }
    let n = ds.len();
    let target = (spec.train_fraction * n as f64).round() as usize;
    let mut rng = SplitMix64::new(spec.seed);
    let mut train_idx: Vec<usize> = Vec::with_capacity(target);
    let mut val_idx: Vec<usize> = Vec::with_capacity(n - target);

    if spec.stratify {
        let groups = indices_by_class(ds);
        for (class, members) in &groups {
            if members.len() < 2 {
                return Err(Error::TooFewExamples(class.key()));
            }
        }
        // Largest-remainder apportionment of the train seats.
        let mut takes: Vec<usize> = Vec::with_capacity(groups.len());
        let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(groups.len());
        for (gi, (_, members)) in groups.iter().enumerate() {
            let exact = spec.train_fraction * members.len() as f64;
            let base = exact.floor() as usize;
            takes.push(base);
            remainders.push((gi, exact - base as f64));
        }
        let assigned: usize = takes.iter().sum();
        let extras = target.saturating_sub(assigned);
        remainders.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        for &(gi, _) in remainders.iter().take(extras) {
            takes[gi] += 1;
        }
        for ((_, members), take) in groups.iter().zip(takes) {
            let mut pool = members.clone();
            rng.shuffle(&mut pool);
            train_idx.extend(&pool[..take]);
            val_idx.extend(&pool[take..]);
        }
    } else {
        let mut pool: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut pool);
        train_idx.extend(&pool[..target]);
        val_idx.extend(&pool[target..]);
    }

    train_idx.sort_unstable();
    val_idx.sort_unstable();
    Ok((ds.subset(&train_idx), ds.subset(&val_idx)))
}

/// A k-way partition of a dataset, stratified by class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    k: usize,
    fold_of: Vec<usize>,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    /// The fold index of each example, in dataset order.
    pub fn fold_of(&self) -> &[usize] {
        &self.fold_of
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }

    /// The (train, validation) pair where `fold` is held out; both sides
    /// preserve the original example order.
    pub fn train_validation(&self, ds: &Dataset, fold: usize) -> (Dataset, Dataset) {
        assert!(fold < self.k, "fold {fold} out of range for k={}", self.k);
        let (mut train, mut val) = (Vec::new(), Vec::new());
        for (i, &f) in self.fold_of.iter().enumerate() {
            if f == fold {
                val.push(i);
            } else {
                train.push(i);
            }
        }
        (ds.subset(&train), ds.subset(&val))
    }
}

/// Assigns each example to one of `k` folds so that every class is spread
/// across folds as evenly as possible (per-class per-fold counts within ±1)
/// and the global fold sizes also stay within ±1.
///
/// Each class's leftover examples (count mod k) go to the folds that are
/// currently smallest overall, lowest fold index first on ties.
pub fn stratified_kfold(ds: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    let n = ds.len();
    if k < 2 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut rng = SplitMix64::new(seed);
    let mut fold_of = vec![0usize; n];
    let mut totals = vec![0usize; k];
    for (_, members) in indices_by_class(ds) {
        let mut pool = members;
        rng.shuffle(&mut pool);
        let base = pool.len() / k;
        let extras = pool.len() % k;
        let mut quota = vec![base; k];
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&i| (totals[i], i));
        for &i in order.iter().take(extras) {
            quota[i] += 1;
        }
        let mut cursor = 0;
        for (fold, &q) in quota.iter().enumerate() {
            for _ in 0..q {
                fold_of[pool[cursor]] = fold;
                cursor += 1;
            }
            totals[fold] += q;
        }
    }
    Ok(FoldAssignment { k, fold_of })
}

/// Reads an EDOS-format CSV and returns the examples labelled at `level`.
///
/// All three label columns are parsed and attached when present; rows
/// without a label at level B or C are dropped when loading at that level.
pub fn load_dataset(path: &Path, level: TaskLevel) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MalformedRow {
                line: 1,
                reason: format!("missing column {name:?}"),
            })
    };
    let idx_id = col("rewire_id")?;
    let idx_text = col("text")?;
    let idx_a = col("label_sexist")?;
    let idx_b = col("label_category")?;
    let idx_c = col("label_vector")?;

    let mut examples = Vec::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                if let csv::ErrorKind::UnequalLengths { pos, expected_len, len } = e.kind() {
                    return Err(Error::MalformedRow {
                        line: pos.as_ref().map(|p| p.line()).unwrap_or(0),
                        reason: format!("expected {expected_len} columns, found {len}"),
                    });
                }
                return Err(e.into());
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or("");
        let absent = |raw: &str| {
            let t = raw.trim();
            t.is_empty() || t.eq_ignore_ascii_case("none")
        };
        let label_a = if absent(field(idx_a)) {
            None
        } else {
            parse_label(field(idx_a), TaskLevel::A)?.as_a()
        };
        let label_b = if absent(field(idx_b)) {
            None
        } else {
            parse_label(field(idx_b), TaskLevel::B)?.as_b()
        };
        let label_c = if absent(field(idx_c)) {
            None
        } else {
            parse_label(field(idx_c), TaskLevel::C)?.as_c()
        };
        let ex = Example {
            id: field(idx_id).trim().to_string(),
            text: field(idx_text).to_string(),
            label_a,
            label_b,
            label_c,
        };
        match level {
            TaskLevel::A => {
                if ex.label_a.is_none() {
                    return Err(Error::MalformedRow {
                        line,
                        reason: "missing label_sexist value".into(),
                    });
                }
            }
            // Only sexist rows carry fine-grained labels; everything else
            // is silently dropped at these levels.
            TaskLevel::B if ex.label_b.is_none() => continue,
            TaskLevel::C if ex.label_c.is_none() => continue,
            _ => {}
        }
        examples.push(ex);
    }
    Dataset::new(level, examples)
}

/// Reads only the `rewire_id` and `text` columns of a CSV, for scoring
/// inputs that carry no labels. Ids must be unique; texts may be empty
/// (an empty text scores on the model bias alone).
pub fn load_unlabeled(path: &Path) -> Result<Vec<(String, String)>> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MalformedRow {
                line: 1,
                reason: format!("missing column {name:?}"),
            })
    };
    let idx_id = col("rewire_id")?;
    let idx_text = col("text")?;
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record?;
        let id = record.get(idx_id).unwrap_or("").trim().to_string();
        let text = record.get(idx_text).unwrap_or("").to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        rows.push((id, text));
    }
    Ok(rows)
}
