use serde::{Deserialize, Serialize};

use crate::digest::Digest;
use crate::domain::{ClassId, Task};
use crate::error::{Error, Result};
use crate::eval::evaluate;
use crate::learner::Learner;
use crate::loss::LossFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverfitRecord {
    pub epoch: usize,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub train_loss: f64,
    pub test_loss: f64,
    pub changed: bool,
    pub fingerprint: Digest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverfitReport {
    pub task: String,
    pub learner_kind: String,
    pub records: Vec<OverfitRecord>,
    /// Every epoch produced the same test predictions, sample by sample.
    pub test_predictions_constant: bool,
    pub test_accuracy_constant: bool,
    /// The changed flags read `true…true false…false`.
    pub changed_monotone: bool,
    /// Last epoch that changed the learner, if a later one did not.
    pub stabilization_epoch: Option<usize>,
    /// Fingerprints agree across all epochs after the last change.
    pub fingerprint_stable: bool,
}

/// Trains one epoch at a time on the same training split, evaluating both
/// splits with cross-entropy after each.
pub fn run_overfitting<L: Learner + ?Sized>(
    learner: &mut L,
    task: &Task,
    epochs: usize,
) -> Result<OverfitReport> {
    if epochs == 0 {
        return Err(Error::contract("at least one epoch is required"));
    }
    let mut records = Vec::with_capacity(epochs);
    let mut predictions: Vec<Vec<ClassId>> = Vec::with_capacity(epochs);
    for epoch in 1..=epochs {
        let log = learner.fit(task.train(), 1)?;
        let train = evaluate(learner, task.train(), LossFunction::CrossEntropy)?;
        let test = evaluate(learner, task.test(), LossFunction::CrossEntropy)?;
        records.push(OverfitRecord {
            epoch,
            train_accuracy: train.accuracy,
            test_accuracy: test.accuracy,
            train_loss: train.mean_loss,
            test_loss: test.mean_loss,
            changed: log.any_changed(),
            fingerprint: learner.fingerprint(),
        });
        predictions.push(test.predictions);
    }

    let test_predictions_constant = predictions.windows(2).all(|w| w[0] == w[1]);
    let test_accuracy_constant = records
        .windows(2)
        .all(|w| w[0].test_accuracy == w[1].test_accuracy);
    let first_quiet = records
        .iter()
        .position(|r| !r.changed)
        .unwrap_or(records.len());
    let changed_monotone = records[first_quiet..].iter().all(|r| !r.changed);
    let stabilization_epoch =
        (changed_monotone && first_quiet < records.len()).then_some(first_quiet);
    let fingerprint_stable = changed_monotone
        && first_quiet < records.len()
        && records[first_quiet.saturating_sub(1)..]
            .windows(2)
            .all(|w| w[0].fingerprint == w[1].fingerprint);

    Ok(OverfitReport {
        task: task.name().to_owned(),
        learner_kind: learner.kind().to_owned(),
        records,
        test_predictions_constant,
        test_accuracy_constant,
        changed_monotone,
        stabilization_epoch,
        fingerprint_stable,
    })
}
