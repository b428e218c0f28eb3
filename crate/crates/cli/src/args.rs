//! Command-line arguments. Every parsed command serializes into the run
//! manifest, so a run can be replayed from its manifest alone.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const MODEL_NAMES: [&str; 6] = ["svm", "nn", "rf", "stack", "tree", "logistic"];

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "drstack",
    version,
    about = "Stacked-ensemble screening of diabetic retinopathy features"
)]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Rank features by information gain or wrapper search.
    Rank(RankArgs),
    /// Train a model on the full dataset and save it.
    Train(TrainArgs),
    /// Apply a saved model to unlabeled rows.
    Predict(PredictArgs),
    /// Cross-validate one model.
    Evaluate(EvaluateArgs),
    /// Run the full selection and evaluation grid and write the report tables.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Infogain,
    Wrapper,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Infogain => "infogain",
            Method::Wrapper => "wrapper",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// Labeled dataset (CSV with the class in the last column, or ARFF).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RankArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = Method::Infogain)]
    pub method: Method,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub top: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "stack", value_parser = MODEL_NAMES)]
    pub model: String,
    /// JSON learner specification replacing the named model's defaults.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    /// Model document written by `train`.
    #[arg(long)]
    pub model_file: PathBuf,
    /// Unlabeled CSV, one instance per row; an optional header is skipped.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "stack", value_parser = MODEL_NAMES)]
    pub model: String,
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    pub folds: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    /// Evaluate on a selected-feature subdataset.
    #[arg(long, value_enum, requires = "top")]
    pub method: Option<Method>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), requires = "method")]
    pub top: Option<u64>,
    /// Rerun feature selection inside every training fold.
    #[arg(long)]
    pub strict_selection: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReproduceArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    pub folds: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    /// Rerun feature selection inside every training fold.
    #[arg(long)]
    pub strict_selection: bool,
}

impl ReproduceArgs {
    pub fn new(data: impl Into<PathBuf>, out: impl Into<PathBuf>, seed: u64) -> Self {
        ReproduceArgs {
            data: DataArgs {
                data: data.into(),
                seed,
                out: out.into(),
            },
            folds: 10,
            repeats: 1,
            strict_selection: false,
        }
    }
}
