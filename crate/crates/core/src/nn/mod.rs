//! Minimal differentiable-network engine.
//!
//! Covers exactly the layer kinds the two demodulation networks need —
//! valid stride-1 convolutions (2-D and 1-D), non-overlapping max pooling,
//! dense, ReLU, inverted dropout, flatten — plus softmax cross-entropy,
//! Adam, a deterministic training loop, finite-difference gradient
//! verification, and bit-exact model persistence.
//!
//! Forward/backward math is generic over [`Scalar`]: training runs in `f32`
//! for throughput, gradient checks in `f64`.

pub mod adam;
pub mod gradcheck;
pub mod io;
pub mod layers;
pub mod loss;
pub mod model;
pub mod tensor;
pub mod train;

pub use adam::{adam_step, AdamState};
pub use gradcheck::{grad_check, GradCheckOptions, GradCheckReport};
pub use io::{load_model, save_model};
pub use layers::{LayerParams, LayerSpec};
pub use loss::{cross_entropy_from_logits, loss_and_grad, softmax};
pub use model::{ForwardCache, Model, NormStats};
pub use tensor::Tensor;
pub use train::{train, Examples};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Element type for network math.
pub trait Scalar:
    num_traits::Float
    + num_traits::NumAssign
    + Copy
    + Send
    + Sync
    + std::fmt::Debug
    + std::fmt::Display
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64(self) -> f64 {
        f64::from(self)
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
}

/// Forward execution mode. Dropout is active only in [`Mode::Train`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// The supported loss; kept explicit so configs are self-describing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    #[default]
    SoftmaxCrossEntropy,
}

/// Optimizer and loop hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub loss: LossKind,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 50,
            batch_size: 128,
            loss: LossKind::SoftmaxCrossEntropy,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::Config("beta1 and beta2 must lie in [0, 1)".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if self.epochs < 1 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if self.batch_size < 1 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn train_config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let mut cfg = TrainConfig::default();
        cfg.epochs = 0;
        assert!(cfg.validate().is_err());
        cfg = TrainConfig::default();
        cfg.beta1 = 1.0;
        assert!(cfg.validate().is_err());
        cfg = TrainConfig::default();
        cfg.learning_rate = 0.0;
        assert!(cfg.validate().is_err());
    }
}
