//! `hiertext evaluate`: score a prediction file against gold labels.
//!
//! The gold CSV may cover more ids than the prediction file (gated
//! pipelines predict a subset); gold rows are matched to predictions by
//! id and every predicted id must exist in the gold file. With
//! `--check-hierarchy`, prediction files from multiple levels are
//! cross-checked and the count of examples violating the taxonomy's
//! parent-child rules is printed.

use crate::commands::{align_gold, write_json};
use crate::errors::{CliError, CliResult};
use hiertext_core::data::load_dataset;
use hiertext_core::eval::{evaluate_run, hierarchy_violations};
use hiertext_core::predictions::PredictionSet;
use hiertext_core::taxonomy::TaskLevel;
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct EvaluateArgs {
    /// Prediction CSV to score.
    #[arg(long, value_name = "FILE")]
    pub predictions: PathBuf,
    /// Gold CSV (EDOS schema).
    #[arg(long, value_name = "FILE")]
    pub gold: PathBuf,
    /// Task level of the prediction file.
    #[arg(long, value_parser = crate::config::parse_level)]
    pub level: TaskLevel,
    /// Where to write the metrics JSON (printed regardless).
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Cross-check level files for taxonomy violations.
    #[arg(long)]
    pub check_hierarchy: bool,
    /// Level-A prediction CSV for the hierarchy check.
    #[arg(long, value_name = "FILE", requires = "check_hierarchy")]
    pub task_a: Option<PathBuf>,
    /// Level-B prediction CSV for the hierarchy check.
    #[arg(long, value_name = "FILE", requires = "check_hierarchy")]
    pub task_b: Option<PathBuf>,
    /// Level-C prediction CSV for the hierarchy check.
    #[arg(long, value_name = "FILE", requires = "check_hierarchy")]
    pub task_c: Option<PathBuf>,
}

fn read_optional(
    path: &Option<PathBuf>,
    level: TaskLevel,
    model_id: &str,
) -> CliResult<Option<PredictionSet>> {
    match path {
        Some(p) => Ok(Some(PredictionSet::read_csv(p, level, model_id)?)),
        None => Ok(None),
    }
}

pub fn run(args: EvaluateArgs) -> CliResult<()> {
    let preds = PredictionSet::read_csv(&args.predictions, args.level, "predictions")?;
    let gold = load_dataset(&args.gold, args.level)?;
    let aligned = align_gold(&gold, &preds)?;
    let report = evaluate_run(&preds, &aligned)?;
    println!("{}", report.to_table());
    println!("macro_f1 {:.6}", report.macro_f1);
    if let Some(path) = &args.output {
        write_json(path, &report)?;
    }

    if args.check_hierarchy {
        let a = read_optional(&args.task_a, TaskLevel::A, "a")?;
        let b = read_optional(&args.task_b, TaskLevel::B, "b")?;
        let c = read_optional(&args.task_c, TaskLevel::C, "c")?;
        let given = [a.is_some(), b.is_some(), c.is_some()]
            .iter()
            .filter(|x| **x)
            .count();
        if given < 2 {
            return Err(CliError::Usage(
                "--check-hierarchy needs at least two of --task-a/--task-b/--task-c".into(),
            ));
        }
        let violations = hierarchy_violations(a.as_ref(), b.as_ref(), c.as_ref());
        println!("hierarchy_violations {violations}");
    }
    Ok(())
}
