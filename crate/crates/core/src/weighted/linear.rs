//! One-weight linear model `x -> w·x` trained by full-batch gradient descent
//! on mean squared error. Exists for the small witnesses, where the
//! least-squares optimum `Σxy / Σx²` is known exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdConfig {
    pub learning_rate: f64,
    /// Stop once a step moves the weight by less than this.
    pub tolerance: f64,
    pub max_steps: usize,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            tolerance: 1e-10,
            max_steps: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdOutcome {
    pub steps: usize,
    pub converged: bool,
    pub final_loss: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalarLinearModel {
    pub weight: f64,
}

impl ScalarLinearModel {
    pub fn new(weight: f64) -> Self {
        Self { weight }
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.weight * x
    }

    pub fn mse(&self, points: &[(f64, f64)]) -> f64 {
        let sum: f64 = points
            .iter()
            .map(|&(x, y)| {
                let r = self.predict(x) - y;
                r * r
            })
            .sum();
        sum / points.len() as f64
    }

    /// Continues from the current weight; the previous optimum is the start.
    pub fn fit(&mut self, points: &[(f64, f64)], cfg: &GdConfig) -> Result<GdOutcome> {
        if points.is_empty() {
            return Err(Error::contract("no training points"));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::contract("non-finite training point"));
        }
        let n = points.len() as f64;
        for step in 1..=cfg.max_steps {
            let grad: f64 = points
                .iter()
                .map(|&(x, y)| 2.0 * (self.weight * x - y) * x)
                .sum::<f64>()
                / n;
            let delta = cfg.learning_rate * grad;
            self.weight -= delta;
            if !self.weight.is_finite() {
                return Err(Error::TrainingDiverged { epoch: step });
            }
            if delta.abs() < cfg.tolerance {
                return Ok(GdOutcome {
                    steps: step,
                    converged: true,
                    final_loss: self.mse(points),
                });
            }
        }
        Ok(GdOutcome {
            steps: cfg.max_steps,
            converged: false,
            final_loss: self.mse(points),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_to_least_squares_weight() {
        let mut m = ScalarLinearModel::default();
        let out = m.fit(&[(1.0, 1.0)], &GdConfig::default()).unwrap();
        assert!(out.converged);
        // Σxy / Σx² = 1
        assert!((m.weight - 1.0).abs() < 1e-6);
    }

    #[test]
    fn diverges_when_step_is_too_large() {
        let mut m = ScalarLinearModel::default();
        let cfg = GdConfig {
            learning_rate: 10.0,
            ..GdConfig::default()
        };
        assert!(matches!(
            m.fit(&[(3.0, 1.0)], &cfg),
            Err(Error::TrainingDiverged { .. })
        ));
    }

    #[test]
    fn empty_set_rejected() {
        assert!(ScalarLinearModel::default()
            .fit(&[], &GdConfig::default())
            .is_err());
    }
}
