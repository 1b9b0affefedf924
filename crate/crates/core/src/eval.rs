use serde::{Deserialize, Serialize};

use crate::domain::{ClassId, Dataset};
use crate::error::{Error, Result};
use crate::learner::Learner;
use crate::loss::{one_hot, LossFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub mean_loss: f64,
    /// Rows are true labels, columns predicted labels.
    pub confusion: Vec<Vec<u64>>,
    pub n: usize,
    /// Raw per-sample predictions in dataset order.
    pub predictions: Vec<ClassId>,
}

/// Scores `learner` on `data` without touching its state.
///
/// Zero-one loss is computed from the hard predictions, so
/// `accuracy + mean zero-one loss == 1` holds exactly.
pub fn evaluate<L: Learner + ?Sized>(
    learner: &L,
    data: &Dataset,
    loss: LossFunction,
) -> Result<EvalReport> {
    if data.is_empty() {
        return Err(Error::contract("cannot evaluate on an empty dataset"));
    }
    let k = data.class_count();
    let mut confusion = vec![vec![0u64; k]; k];
    let mut predictions = Vec::with_capacity(data.len());
    let mut total_loss = 0.0;
    let mut correct = 0usize;

    for s in data.samples() {
        let pred = learner.predict(&s.features, data.name())?;
        if pred >= k {
            return Err(Error::IncompatibleClasses {
                expected: k,
                found: pred + 1,
            });
        }
        let dist = match loss {
            LossFunction::ZeroOne => one_hot(pred, k),
            _ => learner.predict_proba(&s.features, data.name(), k)?,
        };
        total_loss += loss.eval(&dist, s.label)?;
        confusion[s.label][pred] += 1;
        if pred == s.label {
            correct += 1;
        }
        predictions.push(pred);
    }

    let n = data.len();
    Ok(EvalReport {
        accuracy: correct as f64 / n as f64,
        mean_loss: total_loss / n as f64,
        confusion,
        n,
        predictions,
    })
}
