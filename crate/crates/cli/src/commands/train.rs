//! `hiertext train`: one model on a stratified holdout split.
//!
//! Artifacts in the output directory: `resolved_config.json`,
//! `train_ids.txt`, `val_ids.txt`, `model.htxm`, `predictions.csv`
//! (holdout), and `metrics.json`. Runs with identical inputs and seed
//! produce byte-identical artifacts.

use crate::commands::{write_id_list, write_json};
use crate::config::{self, ConfigArgs};
use crate::errors::CliResult;
use hiertext_core::data::{load_dataset, stratified_split, SplitSpec};
use hiertext_core::eval::evaluate_run;
use hiertext_core::features::Featurizer;
use hiertext_core::model::io::{save_model, TrainedModel};
use hiertext_core::model::{predict_dataset, train};
use hiertext_core::rng::derive_seed;
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum LossKind {
    Focal,
    #[value(name = "cross_entropy", alias = "cross-entropy")]
    CrossEntropy,
}

#[derive(Debug, clap::Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Loss function (shorthand for --set train.loss…).
    #[arg(long, value_enum)]
    pub loss: Option<LossKind>,
    /// Focal-loss α (scalar); applies to the focal loss only.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Focal-loss focusing exponent γ; 0 recovers cross-entropy.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Class weighting: auto, none, or comma-separated values per class.
    #[arg(long, value_name = "auto|none|W1,W2,…")]
    pub class_weights: Option<String>,
}

/// Turns the loss/weight shorthand flags into config overrides.
pub fn loss_overrides(
    loss: Option<LossKind>,
    alpha: Option<f64>,
    gamma: Option<f64>,
    class_weights: Option<&str>,
) -> CliResult<Vec<(String, serde_json::Value)>> {
    let mut overrides = Vec::new();
    match loss {
        // Replace the whole object so stale focal fields cannot linger.
        Some(LossKind::CrossEntropy) => overrides.push((
            "train.loss".to_string(),
            json!({ "kind": "cross_entropy" }),
        )),
        Some(LossKind::Focal) => {
            overrides.push(("train.loss.kind".to_string(), json!("focal")))
        }
        None => {}
    }
    if let Some(alpha) = alpha {
        overrides.push(("train.loss.alpha".to_string(), json!(alpha)));
    }
    if let Some(gamma) = gamma {
        overrides.push(("train.loss.gamma".to_string(), json!(gamma)));
    }
    if let Some(raw) = class_weights {
        let value = match raw {
            "auto" => json!("auto"),
            "none" => json!("none"),
            list => {
                let weights: Result<Vec<f64>, _> =
                    list.split(',').map(|w| w.trim().parse::<f64>()).collect();
                match weights {
                    Ok(w) => json!(w),
                    Err(_) => {
                        return Err(crate::errors::CliError::Usage(format!(
                            "--class-weights expects auto, none, or numbers, got {raw:?}"
                        )))
                    }
                }
            }
        };
        overrides.push(("class_weights".to_string(), value));
    }
    Ok(overrides)
}

pub fn run(args: TrainArgs) -> CliResult<()> {
    let overrides = loss_overrides(
        args.loss,
        args.alpha,
        args.gamma,
        args.class_weights.as_deref(),
    )?;
    let cfg = config::resolve(&args.config, &overrides)?;
    let data_path = cfg.data_path()?;
    let out_dir = config::prepare_out_dir(&cfg)?;

    let ds = load_dataset(&data_path, cfg.level)?;
    log::info!("loaded {} level-{} examples", ds.len(), cfg.level);
    let (train_ds, val_ds) = stratified_split(
        &ds,
        &SplitSpec {
            train_fraction: cfg.split.train_fraction,
            seed: derive_seed(cfg.seed, "split"),
            stratify: cfg.split.stratify,
        },
    )?;
    write_id_list(&out_dir.join("train_ids.txt"), train_ds.ids())?;
    write_id_list(&out_dir.join("val_ids.txt"), val_ds.ids())?;

    let featurizer = Featurizer::fit(cfg.featurizer.clone(), &train_ds)?;
    let mut train_cfg = cfg.train.clone();
    train_cfg.seed = derive_seed(cfg.seed, "train");
    train_cfg.class_weights = cfg.class_weights.resolve(&train_ds)?;
    let outcome = train(&train_ds, &featurizer, &train_cfg)?;
    log::info!("per-epoch training loss: {:?}", outcome.loss_trace);

    let model = TrainedModel {
        params: outcome.params,
        featurizer,
        train_config: Some(train_cfg),
    };
    save_model(&model, &out_dir.join("model.htxm"))?;

    let preds = predict_dataset(&model.params, &model.featurizer, "train", &val_ds)?;
    preds.write_csv(&out_dir.join("predictions.csv"))?;
    let report = evaluate_run(&preds, &val_ds)?;
    write_json(&out_dir.join("metrics.json"), &report)?;

    println!("{}", report.to_table());
    println!("macro_f1 {:.6}", report.macro_f1);
    Ok(())
}
