use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Train on task A, then task B, and measure what A lost.
    Forgetting,
    /// Train repeatedly on one dataset, tracking train and test metrics.
    Overfitting,
    /// Run the closed-form witnesses.
    Theorems,
    /// Everything above plus multi-seed accuracy bands.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerChoice {
    Representation,
    Logistic,
    Mlp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "forgetbench",
    version,
    about = "Measure catastrophic forgetting and overfitting of weighted and representation learners",
    arg_required_else_help = true
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// Learner under test.
    #[arg(long, value_enum, default_value_t = LearnerChoice::Representation)]
    pub learner: LearnerChoice,

    /// First task's CSV (WDBC or Pima layout, detected from the column count).
    #[arg(long, value_name = "PATH")]
    pub task_a: Option<PathBuf>,

    /// Second task's CSV.
    #[arg(long, value_name = "PATH")]
    pub task_b: Option<PathBuf>,

    /// Dataset for `overfitting`; defaults to --task-a.
    #[arg(long, value_name = "PATH")]
    pub dataset: Option<PathBuf>,

    /// Seed for splits, initialisation and batch order.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,

    /// Training fraction, in (0, 1).
    #[arg(long, default_value_t = 0.7)]
    pub split: f64,

    /// Training epochs per task, at least 1.
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,

    /// Merge threshold of the representation learner, in [0, 1); 0 disables abstraction.
    #[arg(long, default_value_t = 0.15)]
    pub tau: f64,

    /// Zero-pad inputs so a weighted learner can take tasks of different width.
    #[arg(long)]
    pub pad: bool,

    /// Exit with status 1 if any check in the report fails.
    #[arg(long)]
    pub check: bool,

    /// Report destination; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Report format; csv flattens the per-command table.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// The full effective configuration, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub learner: LearnerChoice,
    pub task_a: Option<PathBuf>,
    pub task_b: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub seed: u64,
    pub split: f64,
    pub epochs: usize,
    pub tau: f64,
    pub pad: bool,
    pub check: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let cfg = Self {
            command: cli.command,
            learner: cli.learner,
            task_a: cli.task_a,
            task_b: cli.task_b,
            dataset: cli.dataset,
            seed: cli.seed,
            split: cli.split,
            epochs: cli.epochs,
            tau: cli.tau,
            pad: cli.pad,
            check: cli.check,
            out: cli.out,
            format: cli.format,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(CliError::usage(format!(
                "--split {} is outside (0, 1)",
                self.split
            )));
        }
        if self.epochs == 0 {
            return Err(CliError::usage("--epochs must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.tau) {
            return Err(CliError::usage(format!(
                "--tau {} is outside [0, 1)",
                self.tau
            )));
        }
        for (flag, path) in [
            ("--task-a", &self.task_a),
            ("--task-b", &self.task_b),
            ("--dataset", &self.dataset),
        ] {
            if let Some(p) = path {
                if !p.is_file() {
                    return Err(CliError::usage(format!(
                        "{flag}: no such file {}",
                        p.display()
                    )));
                }
            }
        }
        if self.task_a.is_some() != self.task_b.is_some() {
            return Err(CliError::usage(
                "--task-a and --task-b must be given together",
            ));
        }
        match self.command {
            Command::Overfitting if self.dataset.is_none() && self.task_a.is_none() => {
                Err(CliError::usage("overfitting needs --dataset (or --task-a)"))
            }
            Command::All if self.task_a.is_none() => {
                Err(CliError::usage("all needs --task-a and --task-b"))
            }
            Command::All if self.format == Format::Csv => Err(CliError::usage(
                "all produces a bundle of reports; use --format json",
            )),
            _ => Ok(()),
        }
    }
}
