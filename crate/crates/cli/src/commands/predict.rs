//! `hiertext predict`: score a CSV with a saved model.
//!
//! The input needs only `rewire_id` and `text` columns. With `--gate-on`
//! the predictions are conditioned on an upstream prediction file from
//! the level above: a level-B model keeps only the rows the upstream
//! level-A file labelled sexist; a level-C model keeps only rows present
//! in the upstream level-B file and restricts each probability vector to
//! the children of the upstream category, which makes the emitted
//! predictions hierarchy-consistent by construction.

use crate::errors::{CliError, CliResult};
use hiertext_core::data::load_unlabeled;
use hiertext_core::model::io::load_model;
use hiertext_core::model::predict_texts;
use hiertext_core::predictions::PredictionSet;
use hiertext_core::taxonomy::{Label, TaskALabel, TaskLevel, Taxonomy};
use std::collections::HashMap;
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct PredictArgs {
    /// Saved model file (.htxm).
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    /// Input CSV with rewire_id and text columns.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Output prediction CSV.
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
    /// Upstream prediction CSV from the level above to gate on.
    #[arg(long, value_name = "FILE")]
    pub gate_on: Option<PathBuf>,
}

pub fn run(args: PredictArgs) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let level = model.params.level();
    let model_id = args
        .model
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".into());
    let rows = load_unlabeled(&args.input)?;

    let preds = match &args.gate_on {
        None => {
            let (ids, texts): (Vec<String>, Vec<String>) = rows.into_iter().unzip();
            predict_texts(&model.params, &model.featurizer, &model_id, ids, &texts)?
        }
        Some(gate_path) => {
            let upstream_level = match level {
                TaskLevel::A => {
                    return Err(CliError::Usage(
                        "--gate-on requires a level-B or level-C model; level A has no upstream"
                            .into(),
                    ))
                }
                TaskLevel::B => TaskLevel::A,
                TaskLevel::C => TaskLevel::B,
            };
            let upstream = PredictionSet::read_csv(gate_path, upstream_level, "upstream")?;
            let upstream_labels: HashMap<&str, Label> = upstream
                .ids()
                .iter()
                .map(String::as_str)
                .zip(upstream.labels())
                .collect();

            // Keep input order; keep only ids the upstream stage passed.
            let total = rows.len();
            let kept: Vec<(String, String, Label)> = rows
                .into_iter()
                .filter_map(|(id, text)| {
                    let label = *upstream_labels.get(id.as_str())?;
                    if upstream_level == TaskLevel::A && label != Label::A(TaskALabel::Sexist) {
                        return None;
                    }
                    Some((id, text, label))
                })
                .collect();
            log::info!("gate kept {} of {total} input rows", kept.len());

            let ids: Vec<String> = kept.iter().map(|(id, _, _)| id.clone()).collect();
            let texts: Vec<String> = kept.iter().map(|(_, text, _)| text.clone()).collect();
            let raw = predict_texts(&model.params, &model.featurizer, &model_id, ids, &texts)?;
            match upstream_level {
                // Gating on A only filters rows; all four categories stay
                // admissible.
                TaskLevel::A => raw,
                // Gating on B also restricts each row to the children of
                // its upstream category.
                TaskLevel::B => {
                    let class_list = Taxonomy::class_list(TaskLevel::C);
                    let mut labels = Vec::with_capacity(raw.len());
                    let mut probs = Vec::with_capacity(raw.len());
                    for (i, (_, _, upstream_label)) in kept.iter().enumerate() {
                        let category = upstream_label
                            .as_b()
                            .expect("level-B predictions carry category labels");
                        let allowed: Vec<usize> = class_list
                            .iter()
                            .enumerate()
                            .filter(|(_, l)| {
                                l.as_c().is_some_and(|v| v.parent() == category)
                            })
                            .map(|(idx, _)| idx)
                            .collect();
                        let restricted = raw.probs(i).restrict(&allowed)?;
                        labels.push(restricted.argmax());
                        probs.push(restricted);
                    }
                    PredictionSet::new(
                        model_id.clone(),
                        TaskLevel::C,
                        raw.ids().to_vec(),
                        labels,
                        probs,
                    )?
                }
                TaskLevel::C => unreachable!("no level gates on C"),
            }
        }
    };

    preds.write_csv(&args.output)?;
    println!(
        "wrote {} level-{} predictions to {}",
        preds.len(),
        level,
        args.output.display()
    );
    Ok(())
}
