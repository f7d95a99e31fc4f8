//! Cross-entropy and focal loss, with optional per-class weighting.
//!
//! The focal loss −α_t·w_t·(1−p_t)^γ·ln(p_t) down-weights examples the
//! model already classifies confidently: the (1−p_t)^γ modulating factor
//! shrinks toward zero as the true-class probability p_t grows, so
//! training effort concentrates on hard examples. At γ = 0 it reduces
//! exactly to (weighted) cross-entropy. The true-class probability is
//! clamped to [1e-12, 1−1e-12] before the logarithm so the loss stays
//! finite without measurably biasing values at f64 precision.

use crate::error::{Error, Result};
use crate::model::ProbabilityVector;
use serde::{Deserialize, Serialize};

/// Clamp bound keeping ln(p_t) finite.
pub const PROB_CLAMP: f64 = 1e-12;

/// The focal α factor: one scalar for every class, or a per-class vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alpha {
    Scalar(f64),
    PerClass(Vec<f64>),
}

impl Alpha {
    pub fn for_class(&self, class: usize) -> f64 {
        match self {
            Alpha::Scalar(a) => *a,
            Alpha::PerClass(v) => v[class],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Alpha::Scalar(a) => a.is_finite() && *a > 0.0,
            Alpha::PerClass(v) => {
                !v.is_empty() && v.iter().all(|a| a.is_finite() && *a > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(
                "focal alpha entries must be finite and positive".into(),
            ))
        }
    }
}

/// Focal-loss hyperparameters. Defaults: α = 1.0, γ = 2.0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocalLossConfig {
    #[serde(default = "default_alpha")]
    pub alpha: Alpha,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_alpha() -> Alpha {
    Alpha::Scalar(1.0)
}

fn default_gamma() -> f64 {
    2.0
}

impl Default for FocalLossConfig {
    fn default() -> Self {
        Self {
            alpha: default_alpha(),
            gamma: default_gamma(),
        }
    }
}

impl FocalLossConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "focal gamma must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        self.alpha.validate()
    }
}

/// Which training objective to optimize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossSpec {
    CrossEntropy,
    Focal(FocalLossConfig),
}

impl Default for LossSpec {
    fn default() -> Self {
        LossSpec::Focal(FocalLossConfig::default())
    }
}

impl LossSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            LossSpec::CrossEntropy => Ok(()),
            LossSpec::Focal(cfg) => cfg.validate(),
        }
    }

    /// Loss of one example under this objective; `class_weight` is the
    /// optional balanced-class multiplier for the true class.
    pub fn example_loss(
        &self,
        p: &ProbabilityVector,
        true_class: usize,
        class_weight: Option<f64>,
    ) -> f64 {
        match self {
            LossSpec::CrossEntropy => cross_entropy(p, true_class, class_weight),
            LossSpec::Focal(cfg) => focal_loss(p, true_class, cfg, class_weight),
        }
    }

    /// The scalar g such that dL/dz_j = g · (δ_{tj} − p_j) for logits z.
    ///
    /// For cross-entropy g = −w. For the focal loss, with u = clamped p_t,
    /// g = α_t·w·(γ·(1−u)^{γ−1}·u·ln(u) − (1−u)^γ); the γ = 0 branch is
    /// special-cased so it reduces to −α_t·w exactly.
    pub(crate) fn logit_factor(&self, p_t: f64, true_class: usize, class_weight: f64) -> f64 {
        match self {
            LossSpec::CrossEntropy => -class_weight,
            LossSpec::Focal(cfg) => {
                let a = cfg.alpha.for_class(true_class) * class_weight;
                if cfg.gamma == 0.0 {
                    return -a;
                }
                let u = p_t.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
                let miss = 1.0 - u;
                a * (cfg.gamma * miss.powf(cfg.gamma - 1.0) * u * u.ln() - miss.powf(cfg.gamma))
            }
        }
    }
}

/// Weighted cross-entropy of one example: −w·ln(p_t).
pub fn cross_entropy(p: &ProbabilityVector, true_class: usize, class_weight: Option<f64>) -> f64 {
    let p_t = p.probs()[true_class].clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    -class_weight.unwrap_or(1.0) * p_t.ln()
}

/// Focal loss of one example: −α_t·w·(1−p_t)^γ·ln(p_t).
pub fn focal_loss(
    p: &ProbabilityVector,
    true_class: usize,
    cfg: &FocalLossConfig,
    class_weight: Option<f64>,
) -> f64 {
    let p_t = p.probs()[true_class].clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    let alpha = cfg.alpha.for_class(true_class);
    let weight = class_weight.unwrap_or(1.0);
    -alpha * weight * (1.0 - p_t).powf(cfg.gamma) * p_t.ln()
}
