//! Samples, datasets and tasks.
//!
//! A [`Task`] pairs a training set (the learned inputs) with a disjoint test
//! set drawn from the same source. Class identifiers are dense integers
//! `0..class_count`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ClassId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: ClassId,
}

impl Sample {
    pub fn new(features: Vec<f64>, label: ClassId) -> Self {
        Self { features, label }
    }
}

/// Bit pattern of a feature vector, used for exact-equality set membership.
pub(crate) fn feature_key(features: &[f64]) -> Vec<u64> {
    features.iter().map(|v| canonical_bits(*v)).collect()
}

/// `-0.0` and `0.0` compare equal, so they must hash equal.
pub(crate) fn canonical_bits(v: f64) -> u64 {
    if v == 0.0 {
        0.0f64.to_bits()
    } else {
        v.to_bits()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    name: String,
    feature_dim: usize,
    class_count: usize,
    samples: Vec<Sample>,
}

impl Dataset {
    /// Validates every invariant: non-empty, consistent dimension, finite
    /// features, labels in range and every class present.
    pub fn new(name: impl Into<String>, class_count: usize, samples: Vec<Sample>) -> Result<Self> {
        let name = name.into();
        if class_count < 2 {
            return Err(Error::contract(format!(
                "dataset '{name}': class_count must be at least 2, got {class_count}"
            )));
        }
        let first = samples
            .first()
            .ok_or_else(|| Error::contract(format!("dataset '{name}' has no samples")))?;
        let feature_dim = first.features.len();
        if feature_dim == 0 {
            return Err(Error::contract(format!(
                "dataset '{name}': empty feature vector"
            )));
        }
        let mut seen = vec![false; class_count];
        for (i, s) in samples.iter().enumerate() {
            if s.features.len() != feature_dim {
                return Err(Error::IncompatibleInput {
                    expected: feature_dim,
                    found: s.features.len(),
                });
            }
            if s.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::contract(format!(
                    "dataset '{name}': sample {i} has a non-finite feature"
                )));
            }
            if s.label >= class_count {
                return Err(Error::contract(format!(
                    "dataset '{name}': sample {i} has label {} >= class_count {class_count}",
                    s.label
                )));
            }
            seen[s.label] = true;
        }
        if let Some(missing) = seen.iter().position(|p| !p) {
            return Err(Error::contract(format!(
                "dataset '{name}': class {missing} has no samples"
            )));
        }
        Ok(Self {
            name,
            feature_dim,
            class_count,
            samples,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count];
        for s in &self.samples {
            counts[s.label] += 1;
        }
        counts
    }

    /// Same samples under another name. The name doubles as the task tag.
    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..self.clone()
        }
    }

    /// True when no feature vector of `self` appears in `other`.
    pub fn is_disjoint_from(&self, other: &Dataset) -> bool {
        if self.feature_dim != other.feature_dim {
            return true;
        }
        let keys: HashSet<Vec<u64>> = self
            .samples
            .iter()
            .map(|s| feature_key(&s.features))
            .collect();
        !other
            .samples
            .iter()
            .any(|s| keys.contains(&feature_key(&s.features)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    name: String,
    train: Dataset,
    test: Dataset,
}

impl Task {
    /// Both splits are renamed to the task name so learners see one tag per task.
    pub fn new(name: impl Into<String>, train: Dataset, test: Dataset) -> Result<Self> {
        let name = name.into();
        if train.feature_dim != test.feature_dim {
            return Err(Error::IncompatibleInput {
                expected: train.feature_dim,
                found: test.feature_dim,
            });
        }
        if train.class_count != test.class_count {
            return Err(Error::IncompatibleClasses {
                expected: train.class_count,
                found: test.class_count,
            });
        }
        if !train.is_disjoint_from(&test) {
            return Err(Error::contract(format!(
                "task '{name}': a test sample also appears in the training split"
            )));
        }
        Ok(Self {
            train: train.renamed(&name),
            test: test.renamed(&name),
            name,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn train(&self) -> &Dataset {
        &self.train
    }

    pub fn test(&self) -> &Dataset {
        &self.test
    }

    pub fn class_count(&self) -> usize {
        self.train.class_count
    }

    pub fn feature_dim(&self) -> usize {
        self.train.feature_dim
    }
}
