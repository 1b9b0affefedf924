//! Polynomial least squares and the small overfitting experiment built on it.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::oracle;

/// Least-squares polynomial, coefficients in ascending powers. Fitted by SVD,
/// so underdetermined problems yield the minimum-norm solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialFit {
    pub coefficients: Vec<f64>,
}

impl PolynomialFit {
    pub fn fit(xs: &[f64], ys: &[f64], degree: usize) -> Result<Self> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::contract("need matching, non-empty x and y"));
        }
        let v = DMatrix::from_fn(xs.len(), degree + 1, |r, c| xs[r].powi(c as i32));
        let y = DVector::from_column_slice(ys);
        let c = v
            .svd(true, true)
            .solve(&y, 1e-12)
            .map_err(|e| Error::contract(format!("least squares failed: {e}")))?;
        Ok(Self {
            coefficients: c.iter().copied().collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c)
    }

    pub fn mse(&self, xs: &[f64], ys: &[f64]) -> f64 {
        let sum: f64 = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let r = self.predict(x) - y;
                r * r
            })
            .sum();
        sum / xs.len() as f64
    }
}

pub const OVERFIT_TRAIN_X: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];
pub const OVERFIT_TEST_X: [f64; 5] = [-1.5, -0.5, 0.5, 1.5, 1.75];
pub const OVERFIT_NOISE: f64 = 0.4;
pub const OVERFIT_DEGREE: usize = 9;
/// Noise seed used by the overfitting witness.
pub const OVERFIT_SEED: u64 = 7;

/// Five noisy points of `y = x` for training and five more for testing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyLine {
    pub train_x: Vec<f64>,
    pub train_y: Vec<f64>,
    pub test_x: Vec<f64>,
    pub test_y: Vec<f64>,
}

impl NoisyLine {
    pub fn generate(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, OVERFIT_NOISE).expect("positive spread");
        let mut noisy =
            |xs: &[f64]| -> Vec<f64> { xs.iter().map(|x| x + rng.sample(noise)).collect() };
        let train_y = noisy(&OVERFIT_TRAIN_X);
        let test_y = noisy(&OVERFIT_TEST_X);
        Self {
            train_x: OVERFIT_TRAIN_X.to_vec(),
            train_y,
            test_x: OVERFIT_TEST_X.to_vec(),
            test_y,
        }
    }
}

/// Train and test MSE of one fit, computed by the system and by the oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitErrors {
    pub degree: usize,
    pub train_mse: f64,
    pub test_mse: f64,
    pub oracle_train_mse: f64,
    pub oracle_test_mse: f64,
}

impl FitErrors {
    pub fn compute(data: &NoisyLine, degree: usize) -> Result<Self> {
        let fit = PolynomialFit::fit(&data.train_x, &data.train_y, degree)?;
        let c = oracle::normal_equations_fit(&data.train_x, &data.train_y, degree)?;
        Ok(Self {
            degree,
            train_mse: fit.mse(&data.train_x, &data.train_y),
            test_mse: fit.mse(&data.test_x, &data.test_y),
            oracle_train_mse: oracle::polynomial_mse(&c, &data.train_x, &data.train_y),
            oracle_test_mse: oracle::polynomial_mse(&c, &data.test_x, &data.test_y),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialOverfit {
    pub seed: u64,
    pub data: NoisyLine,
    pub high: FitErrors,
    pub linear: FitErrors,
}

pub fn polynomial_overfit(seed: u64) -> Result<PolynomialOverfit> {
    let data = NoisyLine::generate(seed);
    let high = FitErrors::compute(&data, OVERFIT_DEGREE)?;
    let linear = FitErrors::compute(&data, 1)?;
    Ok(PolynomialOverfit {
        seed,
        data,
        high,
        linear,
    })
}
