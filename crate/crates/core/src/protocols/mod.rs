//! Experiment protocols: sequential-task forgetting, repeated-epoch
//! overfitting, and small closed-form witnesses.

mod forgetting;
mod overfitting;
mod polynomial;
mod witness;

pub mod oracle;

pub use forgetting::{
    make_conflicting_tasks, run_forgetting, ForgettingReport, CONFLICT_SPREAD, CONFLICT_TASK_A,
    CONFLICT_TASK_B, CONFLICT_TEST_PER_BLOB, CONFLICT_TRAIN_PER_BLOB,
};
pub use overfitting::{run_overfitting, OverfitRecord, OverfitReport};
pub use polynomial::{
    polynomial_overfit, FitErrors, NoisyLine, PolynomialFit, PolynomialOverfit, OVERFIT_DEGREE,
    OVERFIT_NOISE, OVERFIT_SEED, OVERFIT_TEST_X, OVERFIT_TRAIN_X,
};
pub use witness::{
    conflict_sgd_config, witness_conflicting_tasks, witness_theorem_forgetting,
    witness_theorem_overfitting, witness_theorem_same_problem, Check, ConflictOutcome, Measurement,
    WitnessReport, CONFLICT_EPOCHS, CONFLICT_LEARNING_RATE, CONFLICT_MIN_ACC_B, CONFLICT_MIN_DELTA,
    CONFLICT_SEED, INTERPOLATION_MSE, LINEAR_CONTROL_FACTOR, MSE_AGREEMENT, ORACLE_TOLERANCE,
    OVERFIT_RATIO, WEIGHT_TOLERANCE,
};
