//! `hiertext` — a hierarchical sexism-detection text classifier.
//!
//! Subcommands cover the full pipeline: `train` (single model on a
//! stratified holdout), `cv` (stratified k-fold), `predict` (score a CSV
//! with a saved model, optionally gated on upstream predictions),
//! `ensemble` (majority vote or grid-searched weighted average),
//! `evaluate` (macro-F1 report plus hierarchy checks), and
//! `taxonomy dump`.
//!
//! Exit codes: 0 success, 1 runtime/data error, 2 usage or configuration
//! error. Set `HIERTEXT_LOG=info` (or `debug`) for progress diagnostics
//! on stderr. Every command is a pure function of its inputs, config,
//! and seed: re-running produces byte-identical artifacts.

mod commands;
mod config;
mod errors;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hiertext",
    version,
    about = "Train, cross-validate, ensemble, and evaluate hierarchical sexism classifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model and score it on a stratified holdout.
    Train(commands::train::TrainArgs),
    /// Stratified k-fold cross-validation with out-of-fold predictions.
    Cv(commands::cv::CvArgs),
    /// Score a CSV with a saved model.
    Predict(commands::predict::PredictArgs),
    /// Fuse prediction files by voting or weighted averaging.
    Ensemble(commands::ensemble::EnsembleArgs),
    /// Score a prediction file against gold labels.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Inspect the compiled-in label taxonomy.
    Taxonomy {
        #[command(subcommand)]
        action: commands::taxonomy::TaxonomyAction,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("HIERTEXT_LOG", "warn"),
    )
    .format_timestamp(None)
    .init();

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => commands::train::run(args),
        Command::Cv(args) => commands::cv::run(args),
        Command::Predict(args) => commands::predict::run(args),
        Command::Ensemble(args) => commands::ensemble::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Taxonomy { action } => commands::taxonomy::run(action),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
