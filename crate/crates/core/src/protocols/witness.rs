//! Small experiments whose outcome is known in closed form. Each report
//! carries the system's numbers next to the oracle's and the tolerance that
//! decided `pass`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::protocols::forgetting::{make_conflicting_tasks, run_forgetting, ForgettingReport};
use crate::protocols::oracle::{least_squares_slope, relative_difference};
use crate::protocols::polynomial::{polynomial_overfit, OVERFIT_DEGREE, OVERFIT_SEED};
use crate::representation::{RepresentationLearner, RepresentationStore};
use crate::weighted::{GdConfig, ScalarLinearModel, SgdConfig, WeightedLearner};

/// Tolerance on converged 1-D weights and predictions.
pub const WEIGHT_TOLERANCE: f64 = 1e-4;
/// Allowed gap between an oracle value and its exact target.
pub const ORACLE_TOLERANCE: f64 = 1e-9;
/// Ceiling on the interpolating fit's training MSE.
pub const INTERPOLATION_MSE: f64 = 1e-8;
/// Minimum test-MSE ratio of the high-degree fit over the linear one.
pub const OVERFIT_RATIO: f64 = 10.0;
/// Linear control: train and test MSE within this factor of each other.
pub const LINEAR_CONTROL_FACTOR: f64 = 3.0;
/// Relative agreement between system and oracle MSE.
pub const MSE_AGREEMENT: f64 = 1e-6;
/// Conflicting-tasks thresholds for the neural learner.
pub const CONFLICT_MIN_ACC_B: f64 = 0.9;
pub const CONFLICT_MIN_DELTA: f64 = 0.2;
pub const CONFLICT_SEED: u64 = 42;
/// Training schedule for the MLP on the conflicting pair.
pub const CONFLICT_EPOCHS: usize = 50;
pub const CONFLICT_LEARNING_RATE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub system: f64,
    pub oracle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub name: String,
    pub oracle: String,
    pub tolerance: f64,
    pub measurements: Vec<Measurement>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl WitnessReport {
    fn new(name: &str, oracle: &str, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            oracle: oracle.into(),
            tolerance,
            measurements: Vec::new(),
            checks: Vec::new(),
            pass: true,
        }
    }

    fn measure(&mut self, name: &str, system: f64, oracle: Option<f64>) {
        self.measurements.push(Measurement {
            name: name.into(),
            system,
            oracle,
        });
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.pass &= pass;
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail,
        });
    }

    /// Checks `|value − target| ≤ tol` and records both numbers.
    fn check_near(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        let gap = (value - target).abs();
        self.check(
            name,
            gap <= tol,
            format!("{value} vs {target}, |diff| {gap:e} <= {tol:e}"),
        );
    }

    pub fn measurement(&self, name: &str) -> Option<&Measurement> {
        self.measurements.iter().find(|m| m.name == name)
    }
}

/// Fits `model` to `points` by gradient descent and returns `predict(1)`
/// alongside the closed-form slope for the same points.
fn train_phase(model: &mut ScalarLinearModel, points: &[(f64, f64)]) -> Result<(f64, f64)> {
    model.fit(points, &GdConfig::default())?;
    Ok((model.predict(1.0), least_squares_slope(points)))
}

/// A weighted mapping retrained on a conflicting set changes its old answer.
pub fn witness_theorem_forgetting() -> Result<WitnessReport> {
    let mut r = WitnessReport::new(
        "forgetting",
        "closed-form least squares w = Σxy/Σx² on each phase",
        WEIGHT_TOLERANCE,
    );
    let l = [(1.0, 1.0)];
    let l_prime = [(1.0, -1.0)];

    let mut model = ScalarLinearModel::default();
    let (p1, o1) = train_phase(&mut model, &l)?;
    let (p2, o2) = train_phase(&mut model, &l_prime)?;
    r.measure("predict(1) after L", p1, Some(o1));
    r.measure("predict(1) after L'", p2, Some(o2));
    r.check_near("phase 1 reaches 1", p1, 1.0, WEIGHT_TOLERANCE);
    r.check_near("phase 2 reaches -1", p2, -1.0, WEIGHT_TOLERANCE);
    r.check_near("oracle phase 1", o1, 1.0, ORACLE_TOLERANCE);
    r.check_near("oracle phase 2", o2, -1.0, ORACLE_TOLERANCE);
    r.check_near("system matches oracle after L'", p2, o2, WEIGHT_TOLERANCE);
    r.check(
        "old output changed",
        (p1 - p2).abs() > 1.0,
        format!("predict(1) moved from {p1} to {p2}"),
    );

    // Same problem again: nothing to forget.
    let mut control = ScalarLinearModel::default();
    train_phase(&mut control, &l)?;
    let (pc, _) = train_phase(&mut control, &l)?;
    r.measure("predict(1) after L then L", pc, Some(1.0));
    r.check_near("retraining on L keeps 1", pc, 1.0, WEIGHT_TOLERANCE);

    // A representation store keeps both phases apart by task tag.
    let mut store = RepresentationStore::default();
    store.ingest(&[1.0], 1, "L")?;
    store.compact_once("L");
    let before = store.predict_in(&[1.0], "L")?.label;
    store.ingest(&[1.0], 0, "L'")?;
    store.compact_once("L'");
    let after = store.predict_in(&[1.0], "L")?.label;
    r.measure("representation label on L before", before as f64, Some(1.0));
    r.measure("representation label on L after", after as f64, Some(1.0));
    r.check(
        "representation control unchanged",
        before == 1 && after == 1,
        format!("label {before} then {after}"),
    );
    Ok(r)
}

fn line(slope: f64, xs: impl Iterator<Item = f64>) -> Vec<(f64, f64)> {
    xs.map(|x| (x, slope * x)).collect()
}

/// Retraining on data from the same generating function keeps old answers.
pub fn witness_theorem_same_problem() -> Result<WitnessReport> {
    let mut r = WitnessReport::new(
        "same_problem",
        "closed-form least squares w = Σxy/Σx² on each phase",
        WEIGHT_TOLERANCE,
    );
    let mut run =
        |label: &str, l: &[(f64, f64)], l_prime: &[(f64, f64)], target: f64| -> Result<()> {
            let mut model = ScalarLinearModel::default();
            let (p1, o1) = train_phase(&mut model, l)?;
            let (p2, o2) = train_phase(&mut model, l_prime)?;
            r.measure(&format!("{label}: predict(1) after L"), p1, Some(o1));
            r.measure(&format!("{label}: predict(1) after L'"), p2, Some(o2));
            r.check_near(&format!("{label}: phase 1"), p1, 2.0, WEIGHT_TOLERANCE);
            r.check_near(&format!("{label}: phase 2"), p2, target, WEIGHT_TOLERANCE);
            r.check_near(
                &format!("{label}: oracle phase 1"),
                o1,
                2.0,
                ORACLE_TOLERANCE,
            );
            r.check_near(
                &format!("{label}: oracle phase 2"),
                o2,
                target,
                ORACLE_TOLERANCE,
            );
            Ok(())
        };

    run("single point", &[(1.0, 2.0)], &[(2.0, 4.0)], 2.0)?;
    let l = line(2.0, (1..=10).map(|i| i as f64 / 10.0));
    let l_prime = line(2.0, (0..10).map(|i| 0.05 + i as f64 / 10.0));
    run("ten points", &l, &l_prime, 2.0)?;
    // Inconsistent second phase: the check must be able to fail.
    let l3 = line(3.0, (0..10).map(|i| 0.05 + i as f64 / 10.0));
    run("y = 3x control", &l, &l3, 3.0)?;
    Ok(r)
}

/// An interpolating polynomial solves the training problem and fails the
/// held-out one drawn from the same noisy line.
pub fn witness_theorem_overfitting() -> Result<WitnessReport> {
    let mut r = WitnessReport::new(
        "overfitting",
        "polynomial least squares via normal equations and Gaussian elimination",
        MSE_AGREEMENT,
    );
    let o = polynomial_overfit(OVERFIT_SEED)?;
    let (h, lin) = (&o.high, &o.linear);
    r.measure(
        &format!("degree {OVERFIT_DEGREE} train MSE"),
        h.train_mse,
        Some(h.oracle_train_mse),
    );
    r.measure(
        &format!("degree {OVERFIT_DEGREE} test MSE"),
        h.test_mse,
        Some(h.oracle_test_mse),
    );
    r.measure(
        "degree 1 train MSE",
        lin.train_mse,
        Some(lin.oracle_train_mse),
    );
    r.measure("degree 1 test MSE", lin.test_mse, Some(lin.oracle_test_mse));

    r.check(
        "training problem solved",
        h.train_mse < INTERPOLATION_MSE && h.oracle_train_mse < INTERPOLATION_MSE,
        format!(
            "{:e} and oracle {:e} < {INTERPOLATION_MSE:e}",
            h.train_mse, h.oracle_train_mse
        ),
    );
    let ratio = h.oracle_test_mse / lin.oracle_test_mse;
    r.check(
        "held-out problem not solved",
        ratio >= OVERFIT_RATIO && h.test_mse / lin.test_mse >= OVERFIT_RATIO,
        format!("oracle test MSE ratio {ratio:.3} >= {OVERFIT_RATIO}"),
    );
    let control = lin.oracle_test_mse / lin.oracle_train_mse;
    r.check(
        "linear control generalises",
        (1.0 / LINEAR_CONTROL_FACTOR..=LINEAR_CONTROL_FACTOR).contains(&control),
        format!("test/train MSE {control:.3} within factor {LINEAR_CONTROL_FACTOR}"),
    );
    for (name, a, b) in [
        ("high train", h.train_mse, h.oracle_train_mse),
        ("high test", h.test_mse, h.oracle_test_mse),
        ("linear train", lin.train_mse, lin.oracle_train_mse),
        ("linear test", lin.test_mse, lin.oracle_test_mse),
    ] {
        let d = relative_difference(a, b);
        r.check(
            &format!("{name} MSE agrees with oracle"),
            d <= MSE_AGREEMENT,
            format!("{a} vs {b}, relative {d:e}"),
        );
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictOutcome {
    pub witness: WitnessReport,
    pub mlp: ForgettingReport,
    pub representation: ForgettingReport,
}

pub fn conflict_sgd_config() -> SgdConfig {
    SgdConfig {
        learning_rate: CONFLICT_LEARNING_RATE,
        epochs: CONFLICT_EPOCHS,
        ..SgdConfig::default()
    }
}

/// An MLP trained on task A then on the relabelled task B loses A, while the
/// representation learner, given distinct task tags, does not.
pub fn witness_conflicting_tasks(seed: u64) -> Result<ConflictOutcome> {
    let mut r = WitnessReport::new(
        "conflicting_tasks",
        "complementary label functions: acc_B > 0.9 forces acc_A_after < 0.1 on shared inputs",
        CONFLICT_MIN_DELTA,
    );
    let (a, b) = make_conflicting_tasks(seed)?;
    let mut mlp = WeightedLearner::mlp(conflict_sgd_config());
    let m = run_forgetting(&mut mlp, &a, &b, CONFLICT_EPOCHS)?;
    let mut rep = RepresentationLearner::default();
    let p = run_forgetting(&mut rep, &a, &b, 1)?;

    r.measure("mlp acc_a_before", m.acc_a_before, None);
    r.measure("mlp acc_b", m.acc_b, None);
    r.measure("mlp acc_a_after", m.acc_a_after, Some(1.0 - m.acc_b));
    r.measure("mlp forgetting_delta", m.forgetting_delta, None);
    r.measure(
        "representation forgetting_delta",
        p.forgetting_delta,
        Some(0.0),
    );
    r.check(
        "mlp learns task B",
        m.acc_b >= CONFLICT_MIN_ACC_B,
        format!("acc_b {} >= {CONFLICT_MIN_ACC_B}", m.acc_b),
    );
    r.check(
        "mlp forgets task A",
        m.forgetting_delta >= CONFLICT_MIN_DELTA,
        format!("delta {} >= {CONFLICT_MIN_DELTA}", m.forgetting_delta),
    );
    r.check(
        "representation learner keeps task A",
        p.forgetting_delta == 0.0 && p.predictions_identical,
        format!(
            "delta {}, identical {}",
            p.forgetting_delta, p.predictions_identical
        ),
    );
    Ok(ConflictOutcome {
        witness: r,
        mlp: m,
        representation: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_passes(r: &WitnessReport) {
        for c in &r.checks {
            assert!(c.pass, "{}: {} ({})", r.name, c.name, c.detail);
        }
        assert!(r.pass);
    }

    #[test]
    fn forgetting_witness_passes() {
        assert_passes(&witness_theorem_forgetting().unwrap());
    }

    #[test]
    fn same_problem_witness_passes() {
        assert_passes(&witness_theorem_same_problem().unwrap());
    }

    #[test]
    fn overfitting_witness_passes() {
        assert_passes(&witness_theorem_overfitting().unwrap());
    }

    #[test]
    fn conflicting_tasks_witness_passes() {
        assert_passes(&witness_conflicting_tasks(CONFLICT_SEED).unwrap().witness);
    }

    #[test]
    fn failing_check_fails_report() {
        let mut r = WitnessReport::new("x", "y", 0.1);
        r.check_near("near", 1.0, 1.05, 0.1);
        assert!(r.pass);
        r.check_near("far", 1.0, 2.0, 0.1);
        assert!(!r.pass);
    }
}
