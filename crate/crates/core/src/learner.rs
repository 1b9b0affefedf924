use serde::{Deserialize, Serialize};

use crate::digest::Digest;
use crate::domain::{ClassId, Dataset};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based within the `fit` call that produced it.
    pub epoch: usize,
    /// Whether the epoch altered any internal state.
    pub changed: bool,
    pub train_loss: Option<f64>,
    pub train_accuracy: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub records: Vec<EpochRecord>,
}

impl EpochLog {
    pub fn any_changed(&self) -> bool {
        self.records.iter().any(|r| r.changed)
    }

    pub fn last(&self) -> Option<&EpochRecord> {
        self.records.last()
    }
}

/// What every learner family exposes to the protocols.
///
/// `task` is the name of the dataset being fitted or queried. Learners that
/// keep one knowledge structure per task use it to pick the structure;
/// weighted learners ignore it.
pub trait Learner {
    fn kind(&self) -> &str;

    fn fit(&mut self, train: &Dataset, epochs: usize) -> Result<EpochLog>;

    fn predict(&self, features: &[f64], task: &str) -> Result<ClassId>;

    /// Class distribution for loss computation; sums to 1.
    fn predict_proba(&self, features: &[f64], task: &str, class_count: usize) -> Result<Vec<f64>>;

    fn fingerprint(&self) -> Digest;

    fn reset(&mut self);
}

impl<L: Learner + ?Sized> Learner for Box<L> {
    fn kind(&self) -> &str {
        (**self).kind()
    }

    fn fit(&mut self, train: &Dataset, epochs: usize) -> Result<EpochLog> {
        (**self).fit(train, epochs)
    }

    fn predict(&self, features: &[f64], task: &str) -> Result<ClassId> {
        (**self).predict(features, task)
    }

    fn predict_proba(&self, features: &[f64], task: &str, class_count: usize) -> Result<Vec<f64>> {
        (**self).predict_proba(features, task, class_count)
    }

    fn fingerprint(&self) -> Digest {
        (**self).fingerprint()
    }

    fn reset(&mut self) {
        (**self).reset()
    }
}
