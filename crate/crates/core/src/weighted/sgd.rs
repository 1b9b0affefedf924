use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::Dataset;
use crate::error::{Error, Result};
use crate::learner::{EpochLog, EpochRecord};
use crate::loss::{argmax, LossFunction};
use crate::weighted::network::Network;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 10,
            batch_size: 16,
            seed: 7,
            shuffle: true,
        }
    }
}

impl SgdConfig {
    pub fn validate(&self, train_size: usize) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::contract(
                "learning rate must be a positive finite number",
            ));
        }
        if self.epochs == 0 {
            return Err(Error::contract("at least one epoch is required"));
        }
        if self.batch_size == 0 || self.batch_size > train_size {
            return Err(Error::contract(format!(
                "batch size {} must lie in 1..={train_size}",
                self.batch_size
            )));
        }
        Ok(())
    }
}

/// Plain minibatch SGD, seeded from `cfg.seed`.
pub fn train(
    model: &mut Network,
    data: &Dataset,
    loss: LossFunction,
    cfg: &SgdConfig,
) -> Result<EpochLog> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    train_with_rng(model, data, loss, cfg, &mut rng)
}

/// As [`train`], drawing batch orders from a caller-owned generator so
/// that consecutive calls continue one shuffle stream.
pub fn train_with_rng<R: Rng + ?Sized>(
    model: &mut Network,
    data: &Dataset,
    loss: LossFunction,
    cfg: &SgdConfig,
    rng: &mut R,
) -> Result<EpochLog> {
    cfg.validate(data.len())?;
    if loss == LossFunction::ZeroOne {
        return Err(Error::contract("training needs a differentiable loss"));
    }
    if data.feature_dim() != model.input_dim() {
        return Err(Error::IncompatibleInput {
            expected: model.input_dim(),
            found: data.feature_dim(),
        });
    }
    if data.class_count() != model.class_count() {
        return Err(Error::IncompatibleClasses {
            expected: model.class_count(),
            found: data.class_count(),
        });
    }

    let samples = data.samples();
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut log = EpochLog::default();

    for epoch in 1..=cfg.epochs {
        if cfg.shuffle {
            order.shuffle(rng);
        }
        let before = model.params();
        for batch in order.chunks(cfg.batch_size) {
            let mut acc = vec![0.0; model.param_count()];
            for &i in batch {
                let s = &samples[i];
                let (value, grads) = model.loss_and_gradient(&s.features, s.label, loss)?;
                if !value.is_finite() {
                    return Err(Error::TrainingDiverged { epoch });
                }
                let flat = super::network::flatten(&grads);
                for (a, g) in acc.iter_mut().zip(flat) {
                    *a += g;
                }
            }
            let scale = cfg.learning_rate / batch.len() as f64;
            let params = model
                .layers_mut()
                .iter_mut()
                .flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()));
            for (w, g) in params.zip(&acc) {
                *w -= scale * g;
            }
        }
        if !model.is_finite() {
            return Err(Error::TrainingDiverged { epoch });
        }
        let (mean_loss, accuracy) = dataset_loss(model, data, loss)?;
        if !mean_loss.is_finite() {
            return Err(Error::TrainingDiverged { epoch });
        }
        log.records.push(EpochRecord {
            epoch,
            changed: model.params() != before,
            train_loss: Some(mean_loss),
            train_accuracy: Some(accuracy),
        });
    }
    Ok(log)
}

/// Mean loss and accuracy of `model` over `data`.
pub fn dataset_loss(model: &Network, data: &Dataset, loss: LossFunction) -> Result<(f64, f64)> {
    let mut total = 0.0;
    let mut correct = 0usize;
    for s in data.samples() {
        let p = model.forward(&s.features)?;
        total += loss.eval(&p, s.label)?;
        if argmax(&p) == s.label {
            correct += 1;
        }
    }
    let n = data.len() as f64;
    Ok((total / n, correct as f64 / n))
}
