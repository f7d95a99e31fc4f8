//! `hiertext cv`: stratified k-fold cross-validation.
//!
//! Artifacts: `resolved_config.json`, `folds.csv` (example → fold
//! manifest), one `model_fold{i}.htxm` per fold, `oof_predictions.csv`
//! (out-of-fold predictions in original dataset order, covering every
//! example exactly once), and `cv_metrics.json` with pooled and per-fold
//! reports.
//!
//! With `--jobs N` the fold trainings run on N worker threads; each fold
//! is a pure function of (data, config, fold index) and results merge by
//! fold index, so outputs are identical to a sequential run.

use crate::commands::write_json;
use crate::config::{self, ConfigArgs, RunConfig};
use crate::errors::{io_at, CliError, CliResult};
use hiertext_core::data::{load_dataset, stratified_kfold, Dataset, FoldAssignment};
use hiertext_core::eval::{evaluate_run, MetricsReport};
use hiertext_core::features::Featurizer;
use hiertext_core::model::io::{save_model, TrainedModel};
use hiertext_core::model::{predict_dataset, train, ProbabilityVector};
use hiertext_core::predictions::PredictionSet;
use hiertext_core::rng::derive_seed;
use serde::Serialize;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Debug, clap::Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Fold count (overrides the config's `k`).
    #[arg(long)]
    pub k: Option<usize>,
    /// Worker threads for fold training.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Serialize)]
struct CvReport {
    k: usize,
    pooled: MetricsReport,
    per_fold: Vec<MetricsReport>,
}

struct FoldOutput {
    preds: PredictionSet,
    report: MetricsReport,
}

fn run_fold(
    fold: usize,
    ds: &Dataset,
    folds: &FoldAssignment,
    cfg: &RunConfig,
    out_dir: &Path,
) -> CliResult<FoldOutput> {
    let (train_ds, val_ds) = folds.train_validation(ds, fold);
    let featurizer = Featurizer::fit(cfg.featurizer.clone(), &train_ds)?;
    let mut train_cfg = cfg.train.clone();
    train_cfg.seed = derive_seed(cfg.seed, &format!("train/fold{fold}"));
    train_cfg.class_weights = cfg.class_weights.resolve(&train_ds)?;
    let outcome = train(&train_ds, &featurizer, &train_cfg)?;
    let model = TrainedModel {
        params: outcome.params,
        featurizer,
        train_config: Some(train_cfg),
    };
    save_model(&model, &out_dir.join(format!("model_fold{fold}.htxm")))?;
    let preds = predict_dataset(
        &model.params,
        &model.featurizer,
        &format!("fold{fold}"),
        &val_ds,
    )?;
    let report = evaluate_run(&preds, &val_ds)?;
    Ok(FoldOutput { preds, report })
}

/// Writes the fold manifest: every example's id, assigned fold, and
/// label, in dataset order.
fn write_fold_manifest(path: &Path, ds: &Dataset, folds: &FoldAssignment) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(hiertext_core::Error::from)?;
    w.write_record(["rewire_id", "fold", "label"])
        .map_err(hiertext_core::Error::from)?;
    let labels = ds.labels();
    for (i, ex) in ds.examples().iter().enumerate() {
        w.write_record([
            ex.id.as_str(),
            &folds.fold_of()[i].to_string(),
            &labels[i].render(),
        ])
        .map_err(hiertext_core::Error::from)?;
    }
    w.flush().map_err(io_at(path))?;
    Ok(())
}

pub fn run(args: CvArgs) -> CliResult<()> {
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let mut overrides = Vec::new();
    if let Some(k) = args.k {
        overrides.push(("k".to_string(), serde_json::json!(k)));
    }
    let cfg = config::resolve(&args.config, &overrides)?;
    let data_path = cfg.data_path()?;
    let out_dir = config::prepare_out_dir(&cfg)?;

    let ds = load_dataset(&data_path, cfg.level)?;
    let folds = stratified_kfold(&ds, cfg.k, derive_seed(cfg.seed, "kfold"))?;
    write_fold_manifest(&out_dir.join("folds.csv"), &ds, &folds)?;

    // Fold trainings are independent; a shared counter hands out fold
    // indices and results land in per-fold slots.
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<CliResult<FoldOutput>>>> =
        (0..cfg.k).map(|_| Mutex::new(None)).collect();
    let workers = args.jobs.min(cfg.k);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let fold = next.fetch_add(1, Ordering::SeqCst);
                if fold >= cfg.k {
                    break;
                }
                let result = run_fold(fold, &ds, &folds, &cfg, &out_dir);
                *slots[fold].lock().expect("no worker panics holding the lock") =
                    Some(result);
            });
        }
    });

    // Merge deterministically by fold index; the first failing fold (by
    // index, not completion order) decides the reported error.
    let mut outputs = Vec::with_capacity(cfg.k);
    for slot in slots {
        let result = slot
            .into_inner()
            .expect("scope waits for every worker")
            .expect("every fold index was claimed");
        outputs.push(result?);
    }

    // Out-of-fold assembly back into original dataset order.
    let mut assembled: Vec<Option<(usize, ProbabilityVector)>> = vec![None; ds.len()];
    for (fold, output) in outputs.iter().enumerate() {
        let positions: Vec<usize> = folds
            .fold_of()
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(positions.len(), output.preds.len());
        for (row, &pos) in positions.iter().enumerate() {
            assembled[pos] = Some((
                output.preds.label_index(row),
                output.preds.probs(row).clone(),
            ));
        }
    }
    let (labels, probs): (Vec<_>, Vec<_>) = assembled
        .into_iter()
        .map(|slot| slot.expect("folds partition the dataset"))
        .unzip();
    let oof = PredictionSet::new(
        "cv".into(),
        cfg.level,
        ds.ids().map(String::from).collect(),
        labels,
        probs,
    )?;
    oof.write_csv(&out_dir.join("oof_predictions.csv"))?;

    let pooled = evaluate_run(&oof, &ds)?;
    let report = CvReport {
        k: cfg.k,
        pooled: pooled.clone(),
        per_fold: outputs.iter().map(|o| o.report.clone()).collect(),
    };
    write_json(&out_dir.join("cv_metrics.json"), &report)?;

    for (fold, output) in outputs.iter().enumerate() {
        println!("fold {fold} macro_f1 {:.6}", output.report.macro_f1);
    }
    println!("{}", pooled.to_table());
    println!("pooled_macro_f1 {:.6}", pooled.macro_f1);
    Ok(())
}
