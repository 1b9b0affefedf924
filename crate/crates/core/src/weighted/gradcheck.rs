use crate::domain::Sample;
use crate::error::Result;
use crate::loss::LossFunction;
use crate::weighted::network::{flatten, Network};

/// Central-difference step.
pub const GRADIENT_CHECK_STEP: f64 = 1e-5;

/// Largest disagreement between backprop and central differences over every
/// parameter, measured as `|a - n| / max(1, |a| + |n|)`.
pub fn gradient_check(model: &Network, sample: &Sample, loss: LossFunction) -> Result<f64> {
    let (_, grads) = model.loss_and_gradient(&sample.features, sample.label, loss)?;
    let analytic = flatten(&grads);
    let base = model.params();
    let mut probe = model.clone();
    let mut params = base.clone();
    let mut worst: f64 = 0.0;

    for (i, a) in analytic.iter().enumerate() {
        params[i] = base[i] + GRADIENT_CHECK_STEP;
        probe.set_params(&params)?;
        let plus = loss.eval(&probe.forward(&sample.features)?, sample.label)?;
        params[i] = base[i] - GRADIENT_CHECK_STEP;
        probe.set_params(&params)?;
        let minus = loss.eval(&probe.forward(&sample.features)?, sample.label)?;
        params[i] = base[i];

        let numeric = (plus - minus) / (2.0 * GRADIENT_CHECK_STEP);
        let rel = (a - numeric).abs() / 1.0f64.max(a.abs() + numeric.abs());
        worst = worst.max(rel);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighted::network::{Activation, Architecture};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sample(rng: &mut ChaCha8Rng, dim: usize, classes: usize) -> Sample {
        Sample::new(
            (0..dim).map(|_| rng.random_range(0.0..1.0)).collect(),
            rng.random_range(0..classes),
        )
    }

    #[test]
    fn logistic_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = Network::new(Architecture::Logistic, 6, 3, &mut rng);
        let s = random_sample(&mut rng, 6, 3);
        assert!(gradient_check(&net, &s, LossFunction::CrossEntropy).unwrap() < 1e-4);
    }

    #[test]
    fn tanh_mlp_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let net = Network::new(Architecture::default_mlp(), 4, 2, &mut rng);
        let s = random_sample(&mut rng, 4, 2);
        assert!(gradient_check(&net, &s, LossFunction::CrossEntropy).unwrap() < 1e-4);
        assert!(gradient_check(&net, &s, LossFunction::MeanSquaredError).unwrap() < 1e-4);
    }

    #[test]
    fn relu_mlp_away_from_kinks() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let arch = Architecture::Mlp {
            hidden: vec![5, 4],
            activation: Activation::Relu,
        };
        let net = Network::new(arch, 3, 2, &mut rng);
        let s = random_sample(&mut rng, 3, 2);
        assert!(gradient_check(&net, &s, LossFunction::CrossEntropy).unwrap() < 1e-4);
    }

    #[test]
    fn zero_one_has_no_gradient() {
        let net = Network::zeros(Architecture::Logistic, 2, 2);
        let s = Sample::new(vec![0.1, 0.2], 0);
        assert!(gradient_check(&net, &s, LossFunction::ZeroOne).is_err());
    }
}
