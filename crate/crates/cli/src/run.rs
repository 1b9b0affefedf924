use std::collections::BTreeMap;
use std::path::Path;

use forgetbench_core::data::{detect_format, sha256_file, split, DatasetFormat, SplitSpec};
use forgetbench_core::protocols::{
    make_conflicting_tasks, run_forgetting, run_overfitting, witness_conflicting_tasks,
    witness_theorem_forgetting, witness_theorem_overfitting, witness_theorem_same_problem, Check,
    ForgettingReport, CONFLICT_MIN_ACC_B, CONFLICT_MIN_DELTA, CONFLICT_SEED, INTERPOLATION_MSE,
    LINEAR_CONTROL_FACTOR, MSE_AGREEMENT, ORACLE_TOLERANCE, OVERFIT_RATIO, WEIGHT_TOLERANCE,
};
use forgetbench_core::representation::RepresentationLearner;
use forgetbench_core::weighted::{PaddingAdapter, SgdConfig, WeightedLearner, GRADIENT_CHECK_STEP};
use forgetbench_core::{evaluate, Learner, LossFunction, Task};

use crate::config::{Command, LearnerChoice, RunConfig};
use crate::report::{
    AccuracyBand, AllResults, Environment, ExperimentReport, ForgettingResults, OverfittingResults,
    Provenance, Results, Sizes, TheoremResults, REFERENCE_STABILIZATION_EPOCH, SCHEMA_VERSION,
};
use crate::CliError;

/// Split seeds for the accuracy bands.
pub const BAND_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
pub const WBC_REQUIRED_MEAN: f64 = 0.90;
pub const PIMA_REQUIRED_MEAN: f64 = 0.65;
/// Accuracies reported for the original system.
pub const WBC_REFERENCE_ACCURACY: f64 = 0.9532;
pub const PIMA_REFERENCE_ACCURACY: f64 = 0.6970;

fn band_targets(format: DatasetFormat) -> (f64, f64) {
    match format {
        DatasetFormat::Wdbc => (WBC_REQUIRED_MEAN, WBC_REFERENCE_ACCURACY),
        DatasetFormat::Pima => (PIMA_REQUIRED_MEAN, PIMA_REFERENCE_ACCURACY),
    }
}

fn tolerances() -> BTreeMap<String, f64> {
    [
        ("weight_tolerance", WEIGHT_TOLERANCE),
        ("oracle_tolerance", ORACLE_TOLERANCE),
        ("interpolation_mse", INTERPOLATION_MSE),
        ("overfit_ratio", OVERFIT_RATIO),
        ("linear_control_factor", LINEAR_CONTROL_FACTOR),
        ("mse_agreement", MSE_AGREEMENT),
        ("conflict_min_acc_b", CONFLICT_MIN_ACC_B),
        ("conflict_min_delta", CONFLICT_MIN_DELTA),
        ("gradient_check_step", GRADIENT_CHECK_STEP),
        ("wbc_required_mean", WBC_REQUIRED_MEAN),
        ("pima_required_mean", PIMA_REQUIRED_MEAN),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_owned(), v))
    .collect()
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

/// A dataset file loaded and split, with its provenance and integrity check.
struct LoadedTask {
    task: Task,
    format: DatasetFormat,
    provenance: Provenance,
    integrity: Check,
}

fn load_task(path: &Path, seed: u64, fraction: f64) -> Result<LoadedTask, CliError> {
    let format = detect_format(path)?;
    let data = format.load(path)?;
    let sha = sha256_file(path)?;
    let (total, counts) = format.expected_counts();
    let ok = data.len() == total && data.class_counts() == counts.to_vec();
    let integrity = check(
        format!("dataset integrity: {}", format.name()),
        ok,
        format!(
            "{} samples {:?}, expected {total} {:?}",
            data.len(),
            data.class_counts(),
            counts
        ),
    );
    let task = split(
        &data,
        &SplitSpec {
            train_fraction: fraction,
            seed,
            stratified: true,
        },
    )?;
    let provenance = Provenance {
        name: format.name().to_owned(),
        variant: format.variant().to_owned(),
        sha256: Some(sha),
        sizes: Sizes {
            total: data.len(),
            train: task.train().len(),
            test: task.test().len(),
            class_counts: data.class_counts(),
        },
    };
    Ok(LoadedTask {
        task,
        format,
        provenance,
        integrity,
    })
}

fn synthetic_provenance(task: &Task) -> Provenance {
    Provenance {
        name: task.name().to_owned(),
        variant: "synthetic 2-D Gaussian blobs".to_owned(),
        sha256: None,
        sizes: Sizes {
            total: task.train().len() + task.test().len(),
            train: task.train().len(),
            test: task.test().len(),
            class_counts: task.train().class_counts(),
        },
    }
}

/// Builds the configured learner. `widths` lists the input widths it will
/// meet; weighted learners need equal widths unless padding is on.
fn make_learner(cfg: &RunConfig, widths: &[usize]) -> Result<Box<dyn Learner>, CliError> {
    let sgd = SgdConfig {
        seed: cfg.seed,
        ..SgdConfig::default()
    };
    let weighted = match cfg.learner {
        LearnerChoice::Representation => {
            return Ok(Box::new(RepresentationLearner::new(cfg.tau)?));
        }
        LearnerChoice::Logistic => WeightedLearner::logistic(sgd),
        LearnerChoice::Mlp => WeightedLearner::mlp(sgd),
    };
    let max = widths.iter().copied().max().unwrap_or(0);
    let mixed = widths.iter().any(|&w| w != max);
    if cfg.pad {
        Ok(Box::new(PaddingAdapter::new(weighted, max)))
    } else if mixed {
        Err(CliError::usage(format!(
            "learner {} cannot take tasks of widths {widths:?} without --pad",
            weighted.kind()
        )))
    } else {
        Ok(Box::new(weighted))
    }
}

fn is_representation(cfg: &RunConfig) -> bool {
    cfg.learner == LearnerChoice::Representation
}

fn forgetting_checks(r: &ForgettingReport, representation: bool, checks: &mut Vec<Check>) {
    let label = format!("{} -> {}", r.task_a, r.task_b);
    checks.push(check(
        format!("identical predictions imply zero delta ({label})"),
        !r.predictions_identical || r.forgetting_delta == 0.0,
        format!(
            "identical {}, delta {}",
            r.predictions_identical, r.forgetting_delta
        ),
    ));
    if representation {
        checks.push(check(
            format!("no forgetting ({label})"),
            r.predictions_identical && r.forgetting_delta == 0.0,
            format!(
                "{} of the task-A predictions changed, delta {}",
                r.predictions_changed, r.forgetting_delta
            ),
        ));
    }
}

fn overfitting(
    cfg: &RunConfig,
    loaded: &LoadedTask,
    checks: &mut Vec<Check>,
) -> Result<OverfittingResults, CliError> {
    let mut learner = make_learner(cfg, &[loaded.task.feature_dim()])?;
    let report = run_overfitting(&mut *learner, &loaded.task, cfg.epochs)?;
    if is_representation(cfg) {
        checks.push(check(
            "test predictions constant across epochs",
            report.test_predictions_constant,
            format!(
                "test accuracies {:?}",
                report
                    .records
                    .iter()
                    .map(|r| r.test_accuracy)
                    .collect::<Vec<_>>()
            ),
        ));
        checks.push(check(
            "changed flags monotone",
            report.changed_monotone,
            format!(
                "{:?}",
                report.records.iter().map(|r| r.changed).collect::<Vec<_>>()
            ),
        ));
        checks.push(check(
            "fingerprint constant after last change",
            report.fingerprint_stable,
            match report.stabilization_epoch {
                Some(k) => format!(
                    "stabilized at epoch {k}, original system {REFERENCE_STABILIZATION_EPOCH}"
                ),
                None => "no stable epoch observed".to_owned(),
            },
        ));
    }
    Ok(OverfittingResults {
        report,
        reference_stabilization_epoch: REFERENCE_STABILIZATION_EPOCH,
    })
}

fn theorems(checks: &mut Vec<Check>) -> Result<TheoremResults, CliError> {
    let conflict = witness_conflicting_tasks(CONFLICT_SEED)?;
    let witnesses = vec![
        witness_theorem_forgetting()?,
        witness_theorem_same_problem()?,
        witness_theorem_overfitting()?,
        conflict.witness,
    ];
    for w in &witnesses {
        let failed: Vec<&str> = w
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        checks.push(check(
            format!("witness {}", w.name),
            w.pass,
            if failed.is_empty() {
                format!("{} checks passed", w.checks.len())
            } else {
                format!("failed: {}", failed.join(", "))
            },
        ));
    }
    Ok(TheoremResults {
        witnesses,
        conflict_mlp: conflict.mlp,
        conflict_representation: conflict.representation,
    })
}

fn accuracy_band(cfg: &RunConfig, path: &Path) -> Result<AccuracyBand, CliError> {
    let mut accuracies = Vec::with_capacity(BAND_SEEDS.len());
    let mut format = None;
    for seed in BAND_SEEDS {
        let loaded = load_task(path, seed, cfg.split)?;
        let mut learner = RepresentationLearner::new(cfg.tau)?;
        learner.fit(loaded.task.train(), cfg.epochs)?;
        accuracies.push(evaluate(&learner, loaded.task.test(), LossFunction::ZeroOne)?.accuracy);
        format = Some(loaded.format);
    }
    let format = format.expect("at least one seed");
    let (required_mean, reference_accuracy) = band_targets(format);
    Ok(AccuracyBand {
        dataset: format.name().to_owned(),
        seeds: BAND_SEEDS.to_vec(),
        mean: accuracies.iter().sum::<f64>() / accuracies.len() as f64,
        accuracies,
        required_mean,
        reference_accuracy,
    })
}

/// Runs the configured command and assembles its report.
pub fn execute(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let mut checks = Vec::new();
    let mut provenance = Vec::new();

    let results = match cfg.command {
        Command::Forgetting => {
            let (a, b) = match (&cfg.task_a, &cfg.task_b) {
                (Some(pa), Some(pb)) => {
                    let la = load_task(pa, cfg.seed, cfg.split)?;
                    let lb = load_task(pb, cfg.seed, cfg.split)?;
                    checks.push(la.integrity);
                    checks.push(lb.integrity);
                    provenance.push(la.provenance);
                    provenance.push(lb.provenance);
                    (la.task, lb.task)
                }
                _ => {
                    let (a, b) = make_conflicting_tasks(cfg.seed)?;
                    provenance.push(synthetic_provenance(&a));
                    provenance.push(synthetic_provenance(&b));
                    (a, b)
                }
            };
            let mut learner = make_learner(cfg, &[a.feature_dim(), b.feature_dim()])?;
            let report = run_forgetting(&mut *learner, &a, &b, cfg.epochs)?;
            forgetting_checks(&report, is_representation(cfg), &mut checks);
            Results::Forgetting(ForgettingResults { report })
        }
        Command::Overfitting => {
            let path = cfg
                .dataset
                .as_ref()
                .or(cfg.task_a.as_ref())
                .expect("validated");
            let loaded = load_task(path, cfg.seed, cfg.split)?;
            let results = overfitting(cfg, &loaded, &mut checks)?;
            checks.push(loaded.integrity);
            provenance.push(loaded.provenance);
            Results::Overfitting(results)
        }
        Command::Theorems => Results::Theorems(theorems(&mut checks)?),
        Command::All => {
            let pa = cfg.task_a.as_ref().expect("validated");
            let pb = cfg.task_b.as_ref().expect("validated");
            let la = load_task(pa, cfg.seed, cfg.split)?;
            let lb = load_task(pb, cfg.seed, cfg.split)?;
            let widths = [la.task.feature_dim(), lb.task.feature_dim()];

            let mut learner = make_learner(cfg, &widths)?;
            let forgetting_ab = run_forgetting(&mut *learner, &la.task, &lb.task, cfg.epochs)?;
            forgetting_checks(&forgetting_ab, is_representation(cfg), &mut checks);
            let mut learner = make_learner(cfg, &widths)?;
            let forgetting_ba = run_forgetting(&mut *learner, &lb.task, &la.task, cfg.epochs)?;
            forgetting_checks(&forgetting_ba, is_representation(cfg), &mut checks);

            let over = match &cfg.dataset {
                Some(p) => load_task(p, cfg.seed, cfg.split)?,
                None => load_task(pa, cfg.seed, cfg.split)?,
            };
            let overfit = overfitting(cfg, &over, &mut checks)?;
            let theorem_results = theorems(&mut checks)?;

            let mut bands = Vec::new();
            for path in [pa, pb] {
                let band = accuracy_band(cfg, path)?;
                checks.push(check(
                    format!("accuracy band: {}", band.dataset),
                    band.mean >= band.required_mean,
                    format!(
                        "mean {:.4} over seeds {:?} (required >= {}, original system {})",
                        band.mean, band.seeds, band.required_mean, band.reference_accuracy
                    ),
                ));
                bands.push(band);
            }
            checks.push(la.integrity);
            checks.push(lb.integrity);
            provenance.push(la.provenance);
            provenance.push(lb.provenance);
            Results::All(Box::new(AllResults {
                forgetting_ab,
                forgetting_ba,
                overfitting: overfit,
                theorems: theorem_results,
                accuracy_bands: bands,
            }))
        }
    };

    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        dataset_provenance: provenance,
        results,
        environment: Environment {
            seed: cfg.seed,
            tolerances: tolerances(),
        },
        checks,
    })
}
