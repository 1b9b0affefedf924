use serde::{Deserialize, Serialize};

use crate::domain::ClassId;
use crate::error::{Error, Result};

/// Lower clamp applied to probabilities before taking the log.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Allowed deviation of a probability vector's sum from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossFunction {
    CrossEntropy,
    MeanSquaredError,
    ZeroOne,
}

impl LossFunction {
    /// Loss of a predicted class distribution against the true label.
    ///
    /// Mean squared error is averaged over classes against the one-hot
    /// target. Zero-one compares the argmax (lowest index on ties).
    pub fn eval(&self, distribution: &[f64], true_label: ClassId) -> Result<f64> {
        check_distribution(distribution)?;
        if true_label >= distribution.len() {
            return Err(Error::contract(format!(
                "label {true_label} outside a {}-class distribution",
                distribution.len()
            )));
        }
        let value = match self {
            LossFunction::CrossEntropy => {
                -distribution[true_label].clamp(PROBABILITY_FLOOR, 1.0).ln()
            }
            LossFunction::MeanSquaredError => {
                let sum: f64 = distribution
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        let target = if k == true_label { 1.0 } else { 0.0 };
                        (p - target) * (p - target)
                    })
                    .sum();
                sum / distribution.len() as f64
            }
            LossFunction::ZeroOne => {
                if argmax(distribution) == true_label {
                    0.0
                } else {
                    1.0
                }
            }
        };
        Ok(value)
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::contract("empty probability vector"));
    }
    if p.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
        return Err(Error::contract("probability entries must lie in [0, 1]"));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::contract(format!(
            "probability vector sums to {sum}, not 1"
        )));
    }
    Ok(())
}

/// Index of the largest score; the lowest index wins ties.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

pub fn one_hot(label: ClassId, classes: usize) -> Vec<f64> {
    let mut v = vec![0.0; classes];
    v[label] = 1.0;
    v
}
