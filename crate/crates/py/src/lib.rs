//! Python bindings for the hierarchical text classifier.
//!
//! The module mirrors the library surface the `hiertext` CLI is built on:
//! datasets, feature fitting and training, prediction sets, ensembling,
//! metrics, and taxonomy helpers. Configuration objects are passed as
//! JSON strings so the exact same schemas (and defaults) apply as in the
//! CLI's configuration files.
//!
//! ```python
//! import hiertext
//! ds = hiertext.Dataset.load("corpus.csv", "A")
//! train, val = ds.split(train_fraction=0.8, seed=42)
//! model = hiertext.Model.train(train, '{"learning_rate": 0.05}')
//! report = hiertext.evaluate(model.predict(val), val)
//! ```

use hiertext_core::data::{
    class_weights as core_class_weights, load_dataset, stratified_kfold, stratified_split,
    Dataset, DatasetStats, SplitSpec,
};
use hiertext_core::ensemble::{
    grid_search_weights as core_grid_search, majority_vote as core_majority_vote,
    weighted_average as core_weighted_average, WeightVector,
};
use hiertext_core::eval::{evaluate_run, hierarchy_violations as core_hierarchy_violations};
use hiertext_core::features::{Featurizer, FeaturizerConfig};
use hiertext_core::model::io::{load_model, save_model, TrainedModel};
use hiertext_core::model::{
    cross_entropy as core_cross_entropy, focal_loss as core_focal_loss, predict_dataset,
    predict_texts as core_predict_texts, train as core_train, Alpha, FocalLossConfig,
    ProbabilityVector, TrainConfig,
};
use hiertext_core::predictions::PredictionSet;
use hiertext_core::taxonomy::{parse_label as core_parse_label, TaskLevel, Taxonomy};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use std::collections::HashMap;
use std::path::Path;

fn to_py_err(e: hiertext_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn level_of(s: &str) -> PyResult<TaskLevel> {
    s.parse().map_err(PyValueError::new_err)
}

fn json_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    match value {
        serde_json::Value::Null => Ok(py.None()),
        serde_json::Value::Bool(b) => b.into_py_any(py),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py_any(py)
            }
        }
        serde_json::Value::String(s) => s.into_py_any(py),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (key, val) in map {
                dict.set_item(key, json_to_py(py, val)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

/// A labelled corpus at one taxonomy level.
#[pyclass(frozen, name = "Dataset")]
struct PyDataset {
    inner: Dataset,
}

#[pymethods]
impl PyDataset {
    /// Loads the rows of an EDOS-format CSV labelled at `level`
    /// ("A", "B", or "C").
    #[staticmethod]
    fn load(path: &str, level: &str) -> PyResult<Self> {
        let ds = load_dataset(Path::new(path), level_of(level)?).map_err(to_py_err)?;
        Ok(Self { inner: ds })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn level(&self) -> String {
        self.inner.level().to_string()
    }

    fn ids(&self) -> Vec<String> {
        self.inner.ids().map(str::to_string).collect()
    }

    fn texts(&self) -> Vec<String> {
        self.inner.examples().iter().map(|e| e.text.clone()).collect()
    }

    /// Gold labels in row order, rendered canonically.
    fn labels(&self) -> Vec<String> {
        self.inner.labels().iter().map(|l| l.render()).collect()
    }

    /// Per-class example counts, aligned with `class_list(level)`.
    fn class_counts(&self) -> Vec<usize> {
        self.inner.stats().counts
    }

    /// Deterministic stratified train/validation split.
    #[pyo3(signature = (train_fraction = 0.8, seed = 42, stratify = true))]
    fn split(&self, train_fraction: f64, seed: u64, stratify: bool) -> PyResult<(Self, Self)> {
        let spec = SplitSpec {
            train_fraction,
            seed,
            stratify,
        };
        let (train, val) = stratified_split(&self.inner, &spec).map_err(to_py_err)?;
        Ok((Self { inner: train }, Self { inner: val }))
    }

    /// Stratified k-fold assignment: the fold index of each row.
    #[pyo3(signature = (k, seed = 42))]
    fn kfold(&self, k: usize, seed: u64) -> PyResult<Vec<usize>> {
        let folds = stratified_kfold(&self.inner, k, seed).map_err(to_py_err)?;
        Ok(folds.fold_of().to_vec())
    }

    /// A new dataset holding the rows at `indices`, in the given order.
    fn subset(&self, indices: Vec<usize>) -> PyResult<Self> {
        let n = self.inner.len();
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(PyValueError::new_err(format!(
                "index {bad} out of range for {n} rows"
            )));
        }
        let mut seen = vec![false; n];
        for &i in &indices {
            if std::mem::replace(&mut seen[i], true) {
                return Err(PyValueError::new_err(format!("duplicate index {i}")));
            }
        }
        Ok(Self {
            inner: self.inner.subset(&indices),
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(level='{}', rows={})",
            self.inner.level(),
            self.inner.len()
        )
    }
}

/// A trained classifier: featurizer plus softmax parameters.
#[pyclass(frozen, name = "Model")]
struct PyModel {
    inner: TrainedModel,
}

#[pymethods]
impl PyModel {
    /// Fits the featurizer on `dataset` and trains the classifier.
    ///
    /// `train_config` and `featurizer_config` are JSON objects with the
    /// same schemas as the CLI's `train` and `featurizer` config
    /// sections; omitted fields take the same defaults.
    #[staticmethod]
    #[pyo3(signature = (dataset, train_config = None, featurizer_config = None))]
    fn train(
        dataset: &PyDataset,
        train_config: Option<&str>,
        featurizer_config: Option<&str>,
    ) -> PyResult<Self> {
        let train_cfg: TrainConfig = match train_config {
            Some(text) => serde_json::from_str(text)
                .map_err(|e| PyValueError::new_err(format!("train_config: {e}")))?,
            None => TrainConfig::default(),
        };
        let feat_cfg: FeaturizerConfig = match featurizer_config {
            Some(text) => serde_json::from_str(text)
                .map_err(|e| PyValueError::new_err(format!("featurizer_config: {e}")))?,
            None => FeaturizerConfig::default(),
        };
        let featurizer = Featurizer::fit(feat_cfg, &dataset.inner).map_err(to_py_err)?;
        let outcome = core_train(&dataset.inner, &featurizer, &train_cfg).map_err(to_py_err)?;
        Ok(Self {
            inner: TrainedModel {
                params: outcome.params,
                featurizer,
                train_config: Some(train_cfg),
            },
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: load_model(Path::new(path)).map_err(to_py_err)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        save_model(&self.inner, Path::new(path)).map_err(to_py_err)
    }

    #[getter]
    fn level(&self) -> String {
        self.inner.params.level().to_string()
    }

    #[getter]
    fn n_classes(&self) -> usize {
        self.inner.params.n_classes()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.params.dimension()
    }

    /// Predicts every row of a dataset at the model's level.
    #[pyo3(signature = (dataset, model_id = "model"))]
    fn predict(&self, dataset: &PyDataset, model_id: &str) -> PyResult<PyPredictions> {
        let preds = predict_dataset(
            &self.inner.params,
            &self.inner.featurizer,
            model_id,
            &dataset.inner,
        )
        .map_err(to_py_err)?;
        Ok(PyPredictions { inner: preds })
    }

    /// Predicts raw texts; `ids` and `texts` must be parallel.
    #[pyo3(signature = (ids, texts, model_id = "model"))]
    fn predict_texts(
        &self,
        ids: Vec<String>,
        texts: Vec<String>,
        model_id: &str,
    ) -> PyResult<PyPredictions> {
        let preds = core_predict_texts(
            &self.inner.params,
            &self.inner.featurizer,
            model_id,
            ids,
            &texts,
        )
        .map_err(to_py_err)?;
        Ok(PyPredictions { inner: preds })
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(level='{}', classes={}, dimension={})",
            self.inner.params.level(),
            self.inner.params.n_classes(),
            self.inner.params.dimension()
        )
    }
}

/// Per-row predicted labels and class probabilities.
#[pyclass(frozen, name = "Predictions")]
struct PyPredictions {
    inner: PredictionSet,
}

#[pymethods]
impl PyPredictions {
    #[staticmethod]
    #[pyo3(signature = (path, level, model_id = "model"))]
    fn read_csv(path: &str, level: &str, model_id: &str) -> PyResult<Self> {
        let set = PredictionSet::read_csv(Path::new(path), level_of(level)?, model_id)
            .map_err(to_py_err)?;
        Ok(Self { inner: set })
    }

    fn write_csv(&self, path: &str) -> PyResult<()> {
        self.inner.write_csv(Path::new(path)).map_err(to_py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn level(&self) -> String {
        self.inner.level().to_string()
    }

    #[getter]
    fn model_id(&self) -> String {
        self.inner.model_id().to_string()
    }

    fn ids(&self) -> Vec<String> {
        self.inner.ids().to_vec()
    }

    /// Predicted labels in row order, rendered canonically.
    fn labels(&self) -> Vec<String> {
        self.inner.labels().map(|l| l.render()).collect()
    }

    /// Predicted class indices into `class_list(level)`, in row order.
    fn label_indices(&self) -> Vec<usize> {
        (0..self.inner.len()).map(|i| self.inner.label_index(i)).collect()
    }

    /// One probability row per example, ordered by the class list.
    fn probs(&self) -> Vec<Vec<f64>> {
        (0..self.inner.len())
            .map(|i| self.inner.probs(i).probs().to_vec())
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Predictions(level='{}', model_id='{}', rows={})",
            self.inner.level(),
            self.inner.model_id(),
            self.inner.len()
        )
    }
}

/// The three-level label taxonomy as nested dicts.
#[pyfunction]
fn taxonomy(py: Python<'_>) -> PyResult<Py<PyAny>> {
    json_to_py(py, &Taxonomy::dump_json())
}

/// Canonical class labels for a level, in model order.
#[pyfunction]
fn class_list(level: &str) -> PyResult<Vec<String>> {
    Ok(Taxonomy::class_list(level_of(level)?)
        .iter()
        .map(|l| l.render())
        .collect())
}

/// Parses any accepted spelling of a label and returns its canonical
/// rendering at `level`.
#[pyfunction]
fn parse_label(raw: &str, level: &str) -> PyResult<String> {
    core_parse_label(raw, level_of(level)?)
        .map(|l| l.render())
        .map_err(to_py_err)
}

/// Balanced class weights n/(k·count) for per-class counts at `level`.
#[pyfunction]
fn balanced_class_weights(level: &str, counts: Vec<usize>) -> PyResult<Vec<f64>> {
    let class_list = Taxonomy::class_list(level_of(level)?);
    if counts.len() != class_list.len() {
        return Err(PyValueError::new_err(format!(
            "expected {} counts for level, got {}",
            class_list.len(),
            counts.len()
        )));
    }
    let stats = DatasetStats {
        n_samples: counts.iter().sum(),
        n_classes: class_list.len(),
        class_list,
        counts,
    };
    core_class_weights(&stats).map_err(to_py_err)
}

/// Focal loss −α·w·(1−p_t)^γ·ln(p_t) of one probability row.
#[pyfunction]
#[pyo3(signature = (probs, true_class, alpha = 1.0, gamma = 2.0, class_weight = None))]
fn focal_loss(
    probs: Vec<f64>,
    true_class: usize,
    alpha: f64,
    gamma: f64,
    class_weight: Option<f64>,
) -> PyResult<f64> {
    let p = probability_row(probs, true_class)?;
    let cfg = FocalLossConfig {
        alpha: Alpha::Scalar(alpha),
        gamma,
    };
    cfg.validate().map_err(to_py_err)?;
    Ok(core_focal_loss(&p, true_class, &cfg, class_weight))
}

/// Cross-entropy −w·ln(p_t) of one probability row.
#[pyfunction]
#[pyo3(signature = (probs, true_class, class_weight = None))]
fn cross_entropy(probs: Vec<f64>, true_class: usize, class_weight: Option<f64>) -> PyResult<f64> {
    let p = probability_row(probs, true_class)?;
    Ok(core_cross_entropy(&p, true_class, class_weight))
}

fn probability_row(probs: Vec<f64>, true_class: usize) -> PyResult<ProbabilityVector> {
    let n = probs.len();
    let p = ProbabilityVector::new(probs).map_err(to_py_err)?;
    if true_class >= n {
        return Err(PyValueError::new_err(format!(
            "true_class {true_class} out of range for {n} classes"
        )));
    }
    Ok(p)
}

/// Scores predictions against a gold dataset (macro F1, accuracy, and
/// per-class metrics). Gold rows are matched to predictions by id; every
/// predicted id must exist in the gold dataset.
#[pyfunction]
fn evaluate(py: Python<'_>, predictions: &PyPredictions, gold: &PyDataset) -> PyResult<Py<PyAny>> {
    let position: HashMap<&str, usize> =
        gold.inner.ids().enumerate().map(|(i, id)| (id, i)).collect();
    let mut indices = Vec::with_capacity(predictions.inner.len());
    for id in predictions.inner.ids() {
        match position.get(id.as_str()) {
            Some(&i) => indices.push(i),
            None => {
                return Err(PyValueError::new_err(format!(
                    "predicted id {id:?} is not in the gold dataset"
                )))
            }
        }
    }
    let aligned = gold.inner.subset(&indices);
    let report = evaluate_run(&predictions.inner, &aligned).map_err(to_py_err)?;
    let value = serde_json::to_value(&report)
        .map_err(|e| PyValueError::new_err(format!("report serialization: {e}")))?;
    json_to_py(py, &value)
}

/// Hard majority vote over two or more aligned prediction sets.
#[pyfunction]
fn majority_vote(members: Vec<PyRef<'_, PyPredictions>>) -> PyResult<PyPredictions> {
    let sets: Vec<PredictionSet> = members.iter().map(|m| m.inner.clone()).collect();
    Ok(PyPredictions {
        inner: core_majority_vote(&sets).map_err(to_py_err)?,
    })
}

/// Convex combination of aligned prediction sets under `weights`.
#[pyfunction]
fn weighted_average(
    members: Vec<PyRef<'_, PyPredictions>>,
    weights: Vec<f64>,
) -> PyResult<PyPredictions> {
    let sets: Vec<PredictionSet> = members.iter().map(|m| m.inner.clone()).collect();
    let w = WeightVector::new(weights).map_err(to_py_err)?;
    Ok(PyPredictions {
        inner: core_weighted_average(&sets, &w).map_err(to_py_err)?,
    })
}

/// Exhaustive simplex-grid search for the member weights whose weighted
/// average maximizes macro F1 against `truth`. Returns (weights, score).
#[pyfunction]
#[pyo3(signature = (members, truth, step = 0.1))]
fn grid_search_weights(
    members: Vec<PyRef<'_, PyPredictions>>,
    truth: &PyDataset,
    step: f64,
) -> PyResult<(Vec<f64>, f64)> {
    let sets: Vec<PredictionSet> = members.iter().map(|m| m.inner.clone()).collect();
    let (w, score) = core_grid_search(&sets, &truth.inner, step).map_err(to_py_err)?;
    Ok((w.weights().to_vec(), score))
}

/// Counts ids whose predictions across levels break the taxonomy (a
/// category or vector prediction for a not-sexist id, or a vector whose
/// parent disagrees with the category prediction).
#[pyfunction]
#[pyo3(signature = (task_a = None, task_b = None, task_c = None))]
fn hierarchy_violations(
    task_a: Option<PyRef<'_, PyPredictions>>,
    task_b: Option<PyRef<'_, PyPredictions>>,
    task_c: Option<PyRef<'_, PyPredictions>>,
) -> usize {
    core_hierarchy_violations(
        task_a.as_ref().map(|p| &p.inner),
        task_b.as_ref().map(|p| &p.inner),
        task_c.as_ref().map(|p| &p.inner),
    )
}

#[pymodule]
fn hiertext(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyPredictions>()?;
    m.add_function(wrap_pyfunction!(taxonomy, m)?)?;
    m.add_function(wrap_pyfunction!(class_list, m)?)?;
    m.add_function(wrap_pyfunction!(parse_label, m)?)?;
    m.add_function(wrap_pyfunction!(balanced_class_weights, m)?)?;
    m.add_function(wrap_pyfunction!(focal_loss, m)?)?;
    m.add_function(wrap_pyfunction!(cross_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(majority_vote, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_average, m)?)?;
    m.add_function(wrap_pyfunction!(grid_search_weights, m)?)?;
    m.add_function(wrap_pyfunction!(hierarchy_violations, m)?)?;
    Ok(())
}
