//! Adam optimizer with bias-corrected moment estimates.
//!
//! Textbook update per coordinate: m ← β₁m + (1−β₁)g, v ← β₂v + (1−β₂)g²,
//! m̂ = m/(1−β₁^t), v̂ = v/(1−β₂^t), θ ← θ − lr·m̂/(√v̂ + ε). Defaults
//! β₁ = 0.9, β₂ = 0.999, ε = 1e-8.

use crate::model::{Gradient, ModelParams};
use serde::{Deserialize, Serialize};

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    #[serde(default = "default_beta1")]
    pub beta1: f64,
    #[serde(default = "default_beta2")]
    pub beta2: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_beta1() -> f64 {
    0.9
}

fn default_beta2() -> f64 {
    0.999
}

fn default_epsilon() -> f64 {
    1e-8
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            beta1: default_beta1(),
            beta2: default_beta2(),
            epsilon: default_epsilon(),
        }
    }
}

/// First/second moment accumulators for every parameter, plus the step
/// counter driving bias correction. Confined to a single training run.
#[derive(Debug, Clone)]
pub struct AdamState {
    m_weights: Vec<f64>,
    v_weights: Vec<f64>,
    m_bias: Vec<f64>,
    v_bias: Vec<f64>,
    step: u64,
}

impl AdamState {
    pub fn new(n_classes: usize, dimension: usize) -> Self {
        Self {
            m_weights: vec![0.0; n_classes * dimension],
            v_weights: vec![0.0; n_classes * dimension],
            m_bias: vec![0.0; n_classes],
            v_bias: vec![0.0; n_classes],
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Applies one Adam update of `params` along `grad`.
    pub fn step(&mut self, params: &mut ModelParams, grad: &Gradient, lr: f64, cfg: &AdamConfig) {
        assert_eq!(
            grad.weights.len(),
            self.m_weights.len(),
            "gradient shape must match optimizer state"
        );
        assert_eq!(grad.bias.len(), self.m_bias.len());
        self.step += 1;
        let bc1 = 1.0 - cfg.beta1.powi(self.step as i32);
        let bc2 = 1.0 - cfg.beta2.powi(self.step as i32);
        let update = |theta: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
            *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
            *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *theta -= lr * m_hat / (v_hat.sqrt() + cfg.epsilon);
        };
        let (weights, bias) = params.params_mut();
        for ((theta, m), (v, &g)) in weights
            .iter_mut()
            .zip(&mut self.m_weights)
            .zip(self.v_weights.iter_mut().zip(&grad.weights))
        {
            update(theta, m, v, g);
        }
        for ((theta, m), (v, &g)) in bias
            .iter_mut()
            .zip(&mut self.m_bias)
            .zip(self.v_bias.iter_mut().zip(&grad.bias))
        {
            update(theta, m, v, g);
        }
    }
}
