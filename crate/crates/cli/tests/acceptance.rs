//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are pinned here rather than imported so a change in
//! the library constants cannot quietly move the bar.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use forgetbench_cli::{ExperimentReport, Results};
use forgetbench_core::data::{load_pima, load_wbc};
use forgetbench_core::protocols::{
    polynomial_overfit, witness_conflicting_tasks, witness_theorem_forgetting,
    witness_theorem_same_problem, OVERFIT_SEED,
};
use forgetbench_core::weighted::{gradient_check, Activation, Architecture, Network};
use forgetbench_core::{LossFunction, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FORGETTING_TIME_LIMIT: Duration = Duration::from_secs(10);
const CONFLICT_TIME_LIMIT: Duration = Duration::from_secs(30);
const WBC_MIN_MEAN: f64 = 0.90;
const PIMA_MIN_MEAN: f64 = 0.65;
const WBC_REFERENCE: f64 = 0.9532;
const PIMA_REFERENCE: f64 = 0.6970;
const REFERENCE_STABILIZATION: usize = 5;
const CONFLICT_ACC_B: f64 = 0.9;
const CONFLICT_DELTA: f64 = 0.2;
const WEIGHT_TOL: f64 = 1e-4;
const ORACLE_TOL: f64 = 1e-9;
const INTERPOLATION_MSE: f64 = 1e-8;
const OVERFIT_RATIO: f64 = 10.0;
const MSE_AGREEMENT: f64 = 1e-6;
const GRADIENT_TOL: f64 = 1e-4;
const GRADIENT_TRIALS: usize = 100;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn wbc() -> PathBuf {
    data_dir().join("wdbc.data")
}

fn pima() -> PathBuf {
    data_dir().join("pima-indians-diabetes.csv")
}

fn scratch() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("forgetbench-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

struct Run {
    code: i32,
    elapsed: Duration,
    stderr: String,
}

fn cli(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_forgetbench"))
        .args(args)
        .output()
        .expect("spawn forgetbench");
    Run {
        code: out.status.code().unwrap_or(-1),
        elapsed: start.elapsed(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn read_report(path: &Path) -> Result<ExperimentReport, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ExperimentReport::from_json(&text).map_err(|e| e.to_string())
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn ac1(dir: &Path) -> Outcome {
    let mut lines = Vec::new();
    for (a, b, tag) in [(wbc(), pima(), "wbc->pima"), (pima(), wbc(), "pima->wbc")] {
        let out = dir.join(format!("ac1-{tag}.json").replace("->", "-"));
        let run = cli(&[
            "forgetting",
            "--learner",
            "representation",
            "--task-a",
            s(&a),
            "--task-b",
            s(&b),
            "--out",
            s(&out),
        ]);
        if run.code != 0 {
            return Err(format!("{tag}: exit {} ({})", run.code, run.stderr.trim()));
        }
        let report = read_report(&out)?;
        let Results::Forgetting(f) = report.results else {
            return Err(format!("{tag}: not a forgetting report"));
        };
        let f = f.report;
        if !(f.predictions_identical && f.forgetting_delta == 0.0) {
            return Err(format!(
                "{tag}: identical {} delta {}",
                f.predictions_identical, f.forgetting_delta
            ));
        }
        if run.elapsed >= FORGETTING_TIME_LIMIT {
            return Err(format!("{tag}: took {:.2?}", run.elapsed));
        }
        lines.push(format!("{tag} delta 0, identical, {:.2?}", run.elapsed));
    }
    Ok(lines.join("; "))
}

fn ac2(dir: &Path) -> Outcome {
    let out = dir.join("ac2-all.json");
    let run = cli(&[
        "all",
        "--task-a",
        s(&wbc()),
        "--task-b",
        s(&pima()),
        "--out",
        s(&out),
    ]);
    if run.code != 0 {
        return Err(format!("all: exit {} ({})", run.code, run.stderr.trim()));
    }
    let report = read_report(&out)?;
    let Results::All(all) = report.results else {
        return Err("not an all report".into());
    };
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, min, reference) in [
        ("wbc", WBC_MIN_MEAN, WBC_REFERENCE),
        ("pima", PIMA_MIN_MEAN, PIMA_REFERENCE),
    ] {
        let Some(band) = all.accuracy_bands.iter().find(|b| b.dataset == name) else {
            return Err(format!("no accuracy band for {name}"));
        };
        if band.seeds != [1, 2, 3, 4, 5] {
            return Err(format!("{name}: seeds {:?}", band.seeds));
        }
        let mean = band.accuracies.iter().sum::<f64>() / band.accuracies.len() as f64;
        ok &= mean >= min;
        let accs: Vec<String> = band.accuracies.iter().map(|a| format!("{a:.4}")).collect();
        parts.push(format!(
            "{name} mean {mean:.4} (need >= {min}, reference {reference}) [{}]",
            accs.join(", ")
        ));
    }
    let detail = parts.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac3() -> Outcome {
    let start = Instant::now();
    let o = witness_conflicting_tasks(42).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let detail = format!(
        "mlp acc_b {:.4} delta {:.4}; representation delta {}; {:.2?}",
        o.mlp.acc_b, o.mlp.forgetting_delta, o.representation.forgetting_delta, elapsed
    );
    let ok = o.mlp.acc_b >= CONFLICT_ACC_B
        && o.mlp.forgetting_delta >= CONFLICT_DELTA
        && o.representation.forgetting_delta == 0.0
        && elapsed < CONFLICT_TIME_LIMIT;
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn measured(
    r: &forgetbench_core::protocols::WitnessReport,
    name: &str,
) -> Result<(f64, f64), String> {
    let m = r
        .measurement(name)
        .ok_or_else(|| format!("missing measurement '{name}'"))?;
    let oracle = m.oracle.ok_or_else(|| format!("'{name}' has no oracle"))?;
    Ok((m.system, oracle))
}

/// System within `WEIGHT_TOL` of `target`, oracle within `ORACLE_TOL`.
fn near(
    r: &forgetbench_core::protocols::WitnessReport,
    name: &str,
    target: f64,
) -> Result<String, String> {
    let (sys, oracle) = measured(r, name)?;
    if (sys - target).abs() <= WEIGHT_TOL && (oracle - target).abs() <= ORACLE_TOL {
        Ok(format!("{name} = {sys:.6} (oracle {oracle})"))
    } else {
        Err(format!("{name} = {sys} oracle {oracle}, expected {target}"))
    }
}

fn ac4() -> Outcome {
    let r = witness_theorem_same_problem().map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for label in ["single point", "ten points"] {
        parts.push(near(&r, &format!("{label}: predict(1) after L"), 2.0)?);
        parts.push(near(&r, &format!("{label}: predict(1) after L'"), 2.0)?);
    }
    // The inconsistent control must land on 3, proving the check discriminates.
    parts.push(near(&r, "y = 3x control: predict(1) after L'", 3.0)?);
    Ok(parts.join("; "))
}

fn ac5() -> Outcome {
    let r = witness_theorem_forgetting().map_err(|e| e.to_string())?;
    let a = near(&r, "predict(1) after L", 1.0)?;
    let b = near(&r, "predict(1) after L'", -1.0)?;
    Ok(format!("{a}; {b}"))
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1.0f64.max(a.abs() + b.abs())
}

fn ac6() -> Outcome {
    let o = polynomial_overfit(OVERFIT_SEED).map_err(|e| e.to_string())?;
    let (h, lin) = (&o.high, &o.linear);
    let ratio = h.oracle_test_mse / lin.oracle_test_mse;
    let agreement = [
        relative(h.train_mse, h.oracle_train_mse),
        relative(h.test_mse, h.oracle_test_mse),
        relative(lin.train_mse, lin.oracle_train_mse),
        relative(lin.test_mse, lin.oracle_test_mse),
    ]
    .into_iter()
    .fold(0.0f64, f64::max);
    let detail = format!(
        "degree {} train MSE {:.3e}, test/linear-test ratio {ratio:.2}, worst oracle disagreement {agreement:.2e}",
        h.degree, h.train_mse
    );
    let ok = h.train_mse < INTERPOLATION_MSE
        && h.oracle_train_mse < INTERPOLATION_MSE
        && ratio >= OVERFIT_RATIO
        && h.test_mse / lin.test_mse >= OVERFIT_RATIO
        && agreement <= MSE_AGREEMENT;
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac7(dir: &Path) -> Outcome {
    let out = dir.join("ac7-overfitting.json");
    let run = cli(&[
        "overfitting",
        "--dataset",
        s(&wbc()),
        "--epochs",
        "10",
        "--out",
        s(&out),
    ]);
    if run.code != 0 {
        return Err(format!("exit {} ({})", run.code, run.stderr.trim()));
    }
    let report = read_report(&out)?;
    let Results::Overfitting(o) = report.results else {
        return Err("not an overfitting report".into());
    };
    let recs = &o.report.records;
    if recs.len() != 10 {
        return Err(format!("{} epochs recorded", recs.len()));
    }
    let acc_constant = recs
        .iter()
        .all(|r| r.test_accuracy == recs[0].test_accuracy);
    // Once a stored structure stops changing it never changes again.
    let first_quiet = recs.iter().position(|r| !r.changed);
    let monotone = first_quiet.is_none_or(|i| recs[i..].iter().all(|r| !r.changed));
    // The state left by the last changing epoch must persist unchanged.
    let fingerprint_stable = first_quiet.is_some_and(|i| {
        let fp = &recs[i.saturating_sub(1)].fingerprint;
        recs[i..].iter().all(|r| &r.fingerprint == fp)
    });
    // Last epoch that changed the learner.
    let stabilization = first_quiet.map(|i| i.max(1));
    let detail = format!(
        "test accuracy {:.4} on every epoch {acc_constant}, predictions constant {}, changed monotone {monotone}, \
         stabilization epoch {} (reference {REFERENCE_STABILIZATION})",
        recs[0].test_accuracy,
        o.report.test_predictions_constant,
        stabilization.map_or("none".to_string(), |e| e.to_string()),
    );
    if acc_constant && o.report.test_predictions_constant && monotone && fingerprint_stable {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_sample(rng: &mut ChaCha8Rng, dim: usize, classes: usize) -> Sample {
    let features = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
    Sample::new(features, rng.random_range(0..classes))
}

fn ac8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut parts = Vec::new();
    for family in ["logistic", "mlp"] {
        let mut worst = 0.0f64;
        for trial in 0..GRADIENT_TRIALS {
            let dim = rng.random_range(1..=8);
            let classes = rng.random_range(2..=4);
            let arch = match family {
                "logistic" => Architecture::Logistic,
                _ => Architecture::Mlp {
                    hidden: vec![rng.random_range(2..=8)],
                    activation: if trial % 2 == 0 {
                        Activation::Tanh
                    } else {
                        Activation::Relu
                    },
                },
            };
            let model = Network::new(arch, dim, classes, &mut rng);
            let sample = random_sample(&mut rng, dim, classes);
            let loss = if trial % 3 == 0 {
                LossFunction::MeanSquaredError
            } else {
                LossFunction::CrossEntropy
            };
            let err = gradient_check(&model, &sample, loss).map_err(|e| e.to_string())?;
            worst = worst.max(err);
        }
        parts.push(format!(
            "{family} worst {worst:.2e} over {GRADIENT_TRIALS} trials"
        ));
        if worst >= GRADIENT_TOL {
            return Err(parts.join("; "));
        }
    }
    Ok(parts.join("; "))
}

fn ac9(dir: &Path) -> Outcome {
    let cases: [(&str, Vec<String>); 3] = [
        (
            "forgetting",
            vec![
                "forgetting".into(),
                "--task-a".into(),
                s(&wbc()).into(),
                "--task-b".into(),
                s(&pima()).into(),
            ],
        ),
        (
            "overfitting",
            vec!["overfitting".into(), "--dataset".into(), s(&wbc()).into()],
        ),
        ("theorems", vec!["theorems".into()]),
    ];
    let mut done = Vec::new();
    for (name, base) in cases {
        let out = dir.join(format!("ac9-{name}.json"));
        let mut bytes = Vec::new();
        for _ in 0..2 {
            let mut args: Vec<&str> = base.iter().map(String::as_str).collect();
            args.extend(["--seed", "7", "--out", s(&out)]);
            let run = cli(&args);
            if run.code != 0 {
                return Err(format!("{name}: exit {} ({})", run.code, run.stderr.trim()));
            }
            bytes.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        if bytes[0] != bytes[1] {
            return Err(format!("{name}: reports differ"));
        }
        done.push(format!("{name} ({} bytes)", bytes[0].len()));
    }
    Ok(format!("identical reruns: {}", done.join(", ")))
}

fn ac10(dir: &Path) -> Outcome {
    let w = load_wbc(&wbc()).map_err(|e| e.to_string())?;
    let p = load_pima(&pima()).map_err(|e| e.to_string())?;
    let counts = format!(
        "wbc {} {:?}, pima {} {:?}",
        w.len(),
        w.class_counts(),
        p.len(),
        p.class_counts()
    );
    if w.len() != 569
        || w.class_counts() != [357, 212]
        || p.len() != 768
        || p.class_counts() != [500, 268]
    {
        return Err(counts);
    }

    let text = std::fs::read_to_string(wbc()).map_err(|e| e.to_string())?;
    let truncated: String = text.lines().take(500).map(|l| format!("{l}\n")).collect();
    let short = dir.join("wdbc-truncated.data");
    std::fs::write(&short, truncated).map_err(|e| e.to_string())?;
    let run = cli(&[
        "forgetting",
        "--task-a",
        s(&short),
        "--task-b",
        s(&pima()),
        "--check",
        "--out",
        s(&dir.join("ac10.json")),
    ]);
    if run.code != 1 {
        return Err(format!(
            "{counts}; truncated file exit {} (want 1)",
            run.code
        ));
    }
    Ok(format!("{counts}; truncated file under --check exits 1"))
}

fn main() {
    let dir = scratch();
    let criteria: Vec<Criterion> = vec![
        (
            "AC1 representation learner does not forget across datasets",
            Box::new(|| ac1(&dir)),
        ),
        ("AC2 representation accuracy bands", Box::new(|| ac2(&dir))),
        (
            "AC3 conflicting tasks: MLP forgets, representation does not",
            Box::new(ac3),
        ),
        (
            "AC4 same-problem retraining keeps old answers",
            Box::new(ac4),
        ),
        (
            "AC5 conflicting retraining changes old answers",
            Box::new(ac5),
        ),
        ("AC6 interpolating polynomial overfits", Box::new(ac6)),
        (
            "AC7 repeated epochs on WBC leave predictions constant",
            Box::new(|| ac7(&dir)),
        ),
        (
            "AC8 analytic gradients match central differences",
            Box::new(ac8),
        ),
        (
            "AC9 identical config gives byte-identical report",
            Box::new(|| ac9(&dir)),
        ),
        ("AC10 dataset integrity", Box::new(|| ac10(&dir))),
    ];

    let mut failed = 0;
    for (name, f) in &criteria {
        match f() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
