use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use forgetbench_core::protocols::{Check, ForgettingReport, OverfitReport, WitnessReport};
use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Stabilization epoch reported for the original system, shown for comparison.
pub const REFERENCE_STABILIZATION_EPOCH: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sizes {
    pub total: usize,
    pub train: usize,
    pub test: usize,
    pub class_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub name: String,
    pub variant: String,
    /// SHA-256 of the input file; `None` for generated data.
    pub sha256: Option<String>,
    pub sizes: Sizes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgettingResults {
    pub report: ForgettingReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverfittingResults {
    pub report: OverfitReport,
    pub reference_stabilization_epoch: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremResults {
    pub witnesses: Vec<WitnessReport>,
    pub conflict_mlp: ForgettingReport,
    pub conflict_representation: ForgettingReport,
}

/// Representation-learner test accuracy over several split seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyBand {
    pub dataset: String,
    pub seeds: Vec<u64>,
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub required_mean: f64,
    pub reference_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllResults {
    pub forgetting_ab: ForgettingReport,
    pub forgetting_ba: ForgettingReport,
    pub overfitting: OverfittingResults,
    pub theorems: TheoremResults,
    pub accuracy_bands: Vec<AccuracyBand>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Results {
    Forgetting(ForgettingResults),
    Overfitting(OverfittingResults),
    Theorems(TheoremResults),
    All(Box<AllResults>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub dataset_provenance: Vec<Provenance>,
    pub results: Results,
    pub environment: Environment,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Run(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::usage(format!("invalid report: {e}")))
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Run(e.to_string());
        match &self.results {
            Results::Overfitting(r) => {
                w.write_record([
                    "epoch",
                    "train_acc",
                    "test_acc",
                    "train_loss",
                    "test_loss",
                    "changed",
                ])
                .map_err(err)?;
                for rec in &r.report.records {
                    w.write_record([
                        rec.epoch.to_string(),
                        rec.train_accuracy.to_string(),
                        rec.test_accuracy.to_string(),
                        rec.train_loss.to_string(),
                        rec.test_loss.to_string(),
                        rec.changed.to_string(),
                    ])
                    .map_err(err)?;
                }
            }
            Results::Forgetting(r) => {
                w.write_record([
                    "task_a",
                    "task_b",
                    "learner",
                    "acc_a_before",
                    "acc_b",
                    "acc_a_after",
                    "forgetting_delta",
                    "predictions_identical",
                ])
                .map_err(err)?;
                let f = &r.report;
                w.write_record([
                    f.task_a.clone(),
                    f.task_b.clone(),
                    f.learner_kind.clone(),
                    f.acc_a_before.to_string(),
                    f.acc_b.to_string(),
                    f.acc_a_after.to_string(),
                    f.forgetting_delta.to_string(),
                    f.predictions_identical.to_string(),
                ])
                .map_err(err)?;
            }
            Results::Theorems(r) => {
                w.write_record(["witness", "check", "pass", "detail"])
                    .map_err(err)?;
                for wr in &r.witnesses {
                    for c in &wr.checks {
                        w.write_record([&wr.name, &c.name, &c.pass.to_string(), &c.detail])
                            .map_err(err)?;
                    }
                }
            }
            Results::All(_) => {
                return Err(CliError::usage(
                    "all produces a bundle of reports; use --format json",
                ));
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Run(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Run(e.to_string()))
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Writes the rendered report to `path`, or to stdout when `None`.
pub fn emit_report(
    report: &ExperimentReport,
    format: Format,
    path: Option<&Path>,
) -> Result<(), CliError> {
    let text = report.render(format)?;
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Run(format!("cannot write report: {e}")))
        }
    }
}
