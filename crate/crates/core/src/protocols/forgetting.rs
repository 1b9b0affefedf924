use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{gen_blobs, Blob, BlobSpec};
use crate::domain::{ClassId, Dataset, Sample, Task};
use crate::error::{Error, Result};
use crate::eval::evaluate;
use crate::learner::Learner;
use crate::loss::LossFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgettingReport {
    pub task_a: String,
    pub task_b: String,
    pub learner_kind: String,
    pub epochs: usize,
    pub acc_a_before: f64,
    pub acc_b: f64,
    pub acc_a_after: f64,
    /// `acc_a_before − acc_a_after`.
    pub forgetting_delta: f64,
    /// Element-wise equality of the task-A test predictions.
    pub predictions_identical: bool,
    pub predictions_changed: usize,
}

/// Trains A, evaluates A, trains B, evaluates B, evaluates A again.
///
/// The same learner instance is used throughout and never reset, so anything
/// it retained from A is what gets measured after B.
pub fn run_forgetting<L: Learner + ?Sized>(
    learner: &mut L,
    task_a: &Task,
    task_b: &Task,
    epochs: usize,
) -> Result<ForgettingReport> {
    if !task_a.train().is_disjoint_from(task_b.train()) {
        return Err(Error::contract(format!(
            "training sets of '{}' and '{}' overlap",
            task_a.name(),
            task_b.name()
        )));
    }
    learner.fit(task_a.train(), epochs)?;
    let before = evaluate(learner, task_a.test(), LossFunction::ZeroOne)?;
    learner.fit(task_b.train(), epochs)?;
    let on_b = evaluate(learner, task_b.test(), LossFunction::ZeroOne)?;
    let after = evaluate(learner, task_a.test(), LossFunction::ZeroOne)?;

    let changed = before
        .predictions
        .iter()
        .zip(&after.predictions)
        .filter(|(p, q)| p != q)
        .count();
    Ok(ForgettingReport {
        task_a: task_a.name().to_owned(),
        task_b: task_b.name().to_owned(),
        learner_kind: learner.kind().to_owned(),
        epochs,
        acc_a_before: before.accuracy,
        acc_b: on_b.accuracy,
        acc_a_after: after.accuracy,
        forgetting_delta: before.accuracy - after.accuracy,
        predictions_identical: changed == 0,
        predictions_changed: changed,
    })
}

pub const CONFLICT_TASK_A: &str = "conflict-a";
pub const CONFLICT_TASK_B: &str = "conflict-b";
pub const CONFLICT_SPREAD: f64 = 0.05;
pub const CONFLICT_TRAIN_PER_BLOB: usize = 100;
pub const CONFLICT_TEST_PER_BLOB: usize = 50;

fn conflict_blobs(per_blob: usize) -> BlobSpec {
    let blob = |x0: f64| Blob {
        center: vec![x0, 0.5],
        spread: CONFLICT_SPREAD,
        count: per_blob,
    };
    BlobSpec {
        name: "conflict".into(),
        blobs: vec![blob(0.25), blob(0.75)],
    }
}

/// Relabels blob points by the side of `x₀ = 0.5` they fall on.
fn relabel(points: &Dataset, name: &str, label: impl Fn(&[f64]) -> ClassId) -> Result<Dataset> {
    let samples = points
        .samples()
        .iter()
        .map(|s| Sample::new(s.features.clone(), label(&s.features)))
        .collect();
    Dataset::new(name, 2, samples)
}

/// Two 2-D blob tasks over the same region with complementary labels.
///
/// Task A marks `x₀ < 0.5` as class 1, task B marks `x₀ ≥ 0.5` as class 1,
/// so every input carries opposite labels in the two tasks. Each task has
/// 200 training and 100 test points, drawn independently.
pub fn make_conflicting_tasks(seed: u64) -> Result<(Task, Task)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: [u64; 4] = std::array::from_fn(|_| rng.random());
    let label_a = |f: &[f64]| usize::from(f[0] < 0.5);
    let label_b = |f: &[f64]| usize::from(f[0] >= 0.5);
    let train_spec = conflict_blobs(CONFLICT_TRAIN_PER_BLOB);
    let test_spec = conflict_blobs(CONFLICT_TEST_PER_BLOB);

    let a = Task::new(
        CONFLICT_TASK_A,
        relabel(&gen_blobs(&train_spec, seeds[0])?, CONFLICT_TASK_A, label_a)?,
        relabel(&gen_blobs(&test_spec, seeds[1])?, CONFLICT_TASK_A, label_a)?,
    )?;
    let b = Task::new(
        CONFLICT_TASK_B,
        relabel(&gen_blobs(&train_spec, seeds[2])?, CONFLICT_TASK_B, label_b)?,
        relabel(&gen_blobs(&test_spec, seeds[3])?, CONFLICT_TASK_B, label_b)?,
    )?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::RepresentationLearner;

    #[test]
    fn conflicting_tasks_are_complementary() {
        let (a, b) = make_conflicting_tasks(42).unwrap();
        assert_eq!(a.train().len(), 200);
        assert_eq!(a.test().len(), 100);
        assert_eq!(b.train().len(), 200);
        assert_eq!(b.test().len(), 100);
        for s in a.test().samples() {
            assert_eq!(s.label, usize::from(s.features[0] < 0.5));
        }
        for s in b.test().samples() {
            assert_eq!(s.label, usize::from(s.features[0] >= 0.5));
        }
        assert!(a.train().is_disjoint_from(b.train()));
    }

    #[test]
    fn conflicting_tasks_are_deterministic() {
        assert_eq!(
            make_conflicting_tasks(42).unwrap(),
            make_conflicting_tasks(42).unwrap()
        );
        assert_ne!(
            make_conflicting_tasks(42).unwrap(),
            make_conflicting_tasks(43).unwrap()
        );
    }

    #[test]
    fn representation_learner_keeps_task_a() {
        let (a, b) = make_conflicting_tasks(42).unwrap();
        let mut l = RepresentationLearner::default();
        let r = run_forgetting(&mut l, &a, &b, 1).unwrap();
        assert!(r.predictions_identical);
        assert_eq!(r.forgetting_delta, 0.0);
        assert!(r.acc_a_before > 0.95 && r.acc_b > 0.95);
    }

    #[test]
    fn overlapping_training_sets_are_rejected() {
        let (a, _) = make_conflicting_tasks(1).unwrap();
        let mut l = RepresentationLearner::default();
        assert!(matches!(
            run_forgetting(&mut l, &a, &a, 1),
            Err(Error::Contract(_))
        ));
    }
}
