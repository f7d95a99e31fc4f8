//! `hiertext ensemble`: fuse aligned prediction files.
//!
//! `--method vote` takes a hard majority with deterministic tie breaking;
//! `--method weighted` grid-searches simplex weights against `--truth`
//! (required) and emits the best convex combination. When truth is given
//! the fused predictions are also scored.

use crate::commands::{align_gold, write_json};
use crate::errors::{CliError, CliResult};
use hiertext_core::data::load_dataset;
use hiertext_core::ensemble::{grid_search_weights, majority_vote, weighted_average};
use hiertext_core::eval::evaluate_run;
use hiertext_core::predictions::PredictionSet;
use hiertext_core::taxonomy::TaskLevel;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Vote,
    Weighted,
}

#[derive(Debug, clap::Args)]
pub struct EnsembleArgs {
    /// Prediction CSV files to fuse (at least two, aligned on ids).
    #[arg(required = true, num_args = 2.., value_name = "FILE")]
    pub files: Vec<PathBuf>,
    /// Task level of the prediction files.
    #[arg(long, value_parser = crate::config::parse_level)]
    pub level: TaskLevel,
    #[arg(long, value_enum, default_value_t = Method::Vote)]
    pub method: Method,
    /// Gold CSV (EDOS schema) for weight search and scoring.
    #[arg(long, value_name = "FILE")]
    pub truth: Option<PathBuf>,
    /// Grid resolution for the weight search; must divide 1 evenly.
    #[arg(long, default_value_t = 0.1)]
    pub grid_step: f64,
    /// Output path for the fused prediction CSV.
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
    /// Optional metrics JSON for the fused predictions (needs --truth).
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

pub fn run(args: EnsembleArgs) -> CliResult<()> {
    let mut sets = Vec::with_capacity(args.files.len());
    for path in &args.files {
        let model_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        sets.push(PredictionSet::read_csv(path, args.level, &model_id)?);
    }
    // Align the gold rows to the prediction ids (the members are already
    // checked against each other inside the fusion calls).
    let truth = match &args.truth {
        Some(path) => Some(align_gold(&load_dataset(path, args.level)?, &sets[0])?),
        None => None,
    };
    if args.report.is_some() && truth.is_none() {
        return Err(CliError::Usage("--report needs --truth for scoring".into()));
    }

    let fused = match args.method {
        Method::Vote => majority_vote(&sets)?,
        Method::Weighted => {
            let truth = truth.as_ref().ok_or_else(|| {
                CliError::Usage("--method weighted requires --truth".into())
            })?;
            let (weights, best) = grid_search_weights(&sets, truth, args.grid_step)?;
            for (set, w) in sets.iter().zip(weights.weights()) {
                println!("weight {} {w}", set.model_id());
            }
            println!("grid_macro_f1 {best:.6}");
            weighted_average(&sets, &weights)?
        }
    };
    fused.write_csv(&args.output)?;
    println!(
        "wrote {} fused predictions to {}",
        fused.len(),
        args.output.display()
    );

    if let Some(truth) = &truth {
        let report = evaluate_run(&fused, truth)?;
        println!("{}", report.to_table());
        println!("macro_f1 {:.6}", report.macro_f1);
        if let Some(path) = &args.report {
            write_json(path, &report)?;
        }
    }
    Ok(())
}
