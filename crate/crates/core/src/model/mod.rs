//! Multinomial softmax classifier over hashed feature vectors, trained by
//! mini-batch Adam on cross-entropy or focal loss with optional balanced
//! class weights.
//!
//! The model is deliberately simple — a linear layer plus softmax — so
//! every derivative is analytic and checkable against finite differences.
//! Training is single-threaded and fully deterministic given the seed.

pub mod adam;
pub mod io;
pub mod loss;

pub use adam::{AdamConfig, AdamState};
pub use loss::{cross_entropy, focal_loss, Alpha, FocalLossConfig, LossSpec};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::features::{FeatureVector, Featurizer};
use crate::predictions::PredictionSet;
use crate::rng::SplitMix64;
use crate::taxonomy::{Label, TaskLevel, Taxonomy};
use serde::{Deserialize, Serialize};

/// A per-class probability distribution: entries in [0,1] summing to 1
/// within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidConfig("empty probability vector".into()));
        }
        for &p in &probs {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!(
                    "probability {p} outside [0,1]"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Self(probs))
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    /// Softmax with max-subtraction for numerical stability.
    pub fn from_logits(logits: &[f64]) -> Self {
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        Self(exps.into_iter().map(|e| e / sum).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest probability; ties go to the earlier class.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate().skip(1) {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }

    /// Zeroes every class outside `allowed` and renormalizes the rest,
    /// i.e. conditions the distribution on the allowed subset. Used to
    /// constrain fine-grained predictions to the children of an upstream
    /// coarse prediction. Fails if the allowed classes carry no mass.
    pub fn restrict(&self, allowed: &[usize]) -> Result<Self> {
        let mut allowed = allowed.to_vec();
        allowed.sort_unstable();
        allowed.dedup();
        if allowed.is_empty() {
            return Err(Error::InvalidConfig(
                "cannot restrict to an empty class subset".into(),
            ));
        }
        for &c in &allowed {
            if c >= self.0.len() {
                return Err(Error::InvalidConfig(format!(
                    "allowed class {c} out of range for {} classes",
                    self.0.len()
                )));
            }
        }
        let mass: f64 = allowed.iter().map(|&c| self.0[c]).sum();
        if mass <= 0.0 {
            return Err(Error::InvalidConfig(
                "no probability mass on the allowed classes".into(),
            ));
        }
        let mut out = vec![0.0; self.0.len()];
        for &c in &allowed {
            out[c] = self.0[c] / mass;
        }
        Self::new(out)
    }
}

/// Linear classifier parameters: one weight row and bias per class, row
/// order fixed by the canonical class list of the level.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    class_list: Vec<Label>,
    level: TaskLevel,
    dimension: usize,
    weights: Vec<f64>, // row-major [n_classes × dimension]
    bias: Vec<f64>,
}

impl ModelParams {
    pub fn zeros(class_list: Vec<Label>, dimension: usize) -> Self {
        Self::from_parts(
            class_list.clone(),
            dimension,
            vec![0.0; class_list.len() * dimension],
            vec![0.0; class_list.len()],
        )
        .expect("zero parameters satisfy every invariant")
    }

    /// Reassembles parameters, enforcing shape and finiteness and that the
    /// class list is the canonical list for its level.
    pub fn from_parts(
        class_list: Vec<Label>,
        dimension: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self> {
        let level = class_list
            .first()
            .ok_or_else(|| Error::InvalidConfig("empty class list".into()))?
            .level();
        if class_list != Taxonomy::class_list(level) {
            return Err(Error::InvalidConfig(format!(
                "class list must be the canonical level-{level} ordering"
            )));
        }
        let k = class_list.len();
        if weights.len() != k * dimension {
            return Err(Error::DimensionMismatch {
                expected: k * dimension,
                got: weights.len(),
            });
        }
        if bias.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: bias.len(),
            });
        }
        if weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "model parameters must be finite".into(),
            ));
        }
        Ok(Self {
            class_list,
            level,
            dimension,
            weights,
            bias,
        })
    }

    pub fn class_list(&self) -> &[Label] {
        &self.class_list
    }

    pub fn level(&self) -> TaskLevel {
        self.level
    }

    pub fn n_classes(&self) -> usize {
        self.class_list.len()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// The weight row for one class.
    pub fn row(&self, class: usize) -> &[f64] {
        &self.weights[class * self.dimension..(class + 1) * self.dimension]
    }

    pub(crate) fn params_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.weights, &mut self.bias)
    }
}

/// dL/dθ with the same layout as [`ModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Training hyperparameters. `class_weights`, when present, must have one
/// entry per class in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default)]
    pub loss: LossSpec,
    #[serde(default)]
    pub class_weights: Option<Vec<f64>>,
    #[serde(default)]
    pub optimizer: AdamConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_learning_rate() -> f64 {
    2e-5
}

fn default_epochs() -> usize {
    6
}

fn default_batch_size() -> usize {
    6
}

fn default_seed() -> u64 {
    42
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: default_learning_rate(),
            epochs: default_epochs(),
            batch_size: default_batch_size(),
            loss: LossSpec::default(),
            class_weights: None,
            optimizer: AdamConfig::default(),
            seed: default_seed(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        self.loss.validate()?;
        if let Some(w) = &self.class_weights {
            if w.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                return Err(Error::InvalidConfig(
                    "class weights must be finite and positive".into(),
                ));
            }
        }
        Ok(())
    }

    /// Checks the parts whose lengths depend on the number of classes.
    fn validate_for(&self, n_classes: usize) -> Result<()> {
        self.validate()?;
        if let Some(w) = &self.class_weights {
            if w.len() != n_classes {
                return Err(Error::InvalidConfig(format!(
                    "class_weights has {} entries for {n_classes} classes",
                    w.len()
                )));
            }
        }
        if let LossSpec::Focal(FocalLossConfig {
            alpha: Alpha::PerClass(a),
            ..
        }) = &self.loss
        {
            if a.len() != n_classes {
                return Err(Error::InvalidConfig(format!(
                    "per-class alpha has {} entries for {n_classes} classes",
                    a.len()
                )));
            }
        }
        Ok(())
    }
}

/// softmax(Wx + b) for one feature vector.
pub fn forward_probs(params: &ModelParams, x: &FeatureVector) -> Result<ProbabilityVector> {
    if x.dimension() != params.dimension {
        return Err(Error::DimensionMismatch {
            expected: params.dimension,
            got: x.dimension(),
        });
    }
    let logits: Vec<f64> = (0..params.n_classes())
        .map(|c| params.bias[c] + x.dot(params.row(c)))
        .collect();
    Ok(ProbabilityVector::from_logits(&logits))
}

/// Mean loss over a batch and its exact analytic gradient.
///
/// Per example, dL/dz_j = g·(δ_tj − p_j) with the loss-specific factor g
/// (see [`LossSpec::logit_factor`]); the chain rule pushes that through
/// the linear layer onto the (sparse) feature coordinates.
pub fn loss_and_gradient(
    params: &ModelParams,
    batch: &[(&FeatureVector, usize)],
    cfg: &TrainConfig,
) -> Result<(f64, Gradient)> {
    if batch.is_empty() {
        return Err(Error::InvalidConfig(
            "loss gradient needs a non-empty batch".into(),
        ));
    }
    let k = params.n_classes();
    cfg.validate_for(k)?;
    let dim = params.dimension;
    let mut grad = Gradient {
        weights: vec![0.0; k * dim],
        bias: vec![0.0; k],
    };
    let mut total_loss = 0.0;
    let scale = 1.0 / batch.len() as f64;
    for &(x, true_class) in batch {
        let p = forward_probs(params, x)?;
        let w_t = cfg.class_weights.as_ref().map(|w| w[true_class]);
        total_loss += cfg.loss.example_loss(&p, true_class, w_t);
        let g = cfg
            .loss
            .logit_factor(p.probs()[true_class], true_class, w_t.unwrap_or(1.0));
        for (j, &p_j) in p.probs().iter().enumerate() {
            let delta = if j == true_class { 1.0 } else { 0.0 };
            let coeff = g * (delta - p_j) * scale;
            grad.bias[j] += coeff;
            let row = &mut grad.weights[j * dim..(j + 1) * dim];
            for (i, v) in x.iter() {
                row[i] += coeff * v;
            }
        }
    }
    Ok((total_loss * scale, grad))
}

/// A trained model plus its per-epoch mean training loss.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: ModelParams,
    pub loss_trace: Vec<f64>,
}

/// Trains from zero initialization: `epochs` passes of seeded-shuffled
/// mini-batches through the analytic gradient and Adam.
pub fn train(ds: &Dataset, featurizer: &Featurizer, cfg: &TrainConfig) -> Result<TrainOutcome> {
    let class_list = Taxonomy::class_list(ds.level());
    cfg.validate_for(class_list.len())?;
    if ds.is_empty() {
        return Err(Error::InvalidConfig("cannot train on an empty dataset".into()));
    }
    let xs: Vec<FeatureVector> = ds
        .examples()
        .iter()
        .map(|ex| featurizer.transform(&ex.text))
        .collect();
    let ys: Vec<usize> = ds
        .labels()
        .iter()
        .map(|l| {
            class_list
                .iter()
                .position(|c| c == l)
                .expect("dataset labels lie in the canonical class list")
        })
        .collect();
    let mut params = ModelParams::zeros(class_list, featurizer.dimension());
    let mut state = AdamState::new(params.n_classes(), params.dimension);
    let mut rng = SplitMix64::new(cfg.seed);
    let mut order: Vec<usize> = (0..ds.len()).collect();
    let mut loss_trace = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<(&FeatureVector, usize)> =
                chunk.iter().map(|&i| (&xs[i], ys[i])).collect();
            let (batch_loss, grad) = loss_and_gradient(&params, &batch, cfg)?;
            state.step(&mut params, &grad, cfg.learning_rate, &cfg.optimizer);
            epoch_loss += batch_loss * chunk.len() as f64;
        }
        loss_trace.push(epoch_loss / ds.len() as f64);
    }
    Ok(TrainOutcome { params, loss_trace })
}

/// Predicts for parallel id/text slices; labels are the argmax of each
/// probability vector with ties broken toward the earlier class.
pub fn predict_texts(
    params: &ModelParams,
    featurizer: &Featurizer,
    model_id: &str,
    ids: Vec<String>,
    texts: &[String],
) -> Result<PredictionSet> {
    if featurizer.dimension() != params.dimension {
        return Err(Error::DimensionMismatch {
            expected: params.dimension,
            got: featurizer.dimension(),
        });
    }
    if ids.len() != texts.len() {
        return Err(Error::Misaligned(format!(
            "{} ids for {} texts",
            ids.len(),
            texts.len()
        )));
    }
    let mut labels = Vec::with_capacity(texts.len());
    let mut probs = Vec::with_capacity(texts.len());
    for text in texts {
        let p = forward_probs(params, &featurizer.transform(text))?;
        labels.push(p.argmax());
        probs.push(p);
    }
    PredictionSet::new(model_id.to_string(), params.level, ids, labels, probs)
}

/// Predicts over a dataset's ids and texts (its labels are ignored).
pub fn predict_dataset(
    params: &ModelParams,
    featurizer: &Featurizer,
    model_id: &str,
    ds: &Dataset,
) -> Result<PredictionSet> {
    let ids: Vec<String> = ds.ids().map(String::from).collect();
    let texts: Vec<String> = ds.examples().iter().map(|e| e.text.clone()).collect();
    predict_texts(params, featurizer, model_id, ids, &texts)
}
