//! Run configuration: a JSON file merged with profile defaults, `--set`
//! dotted-path overrides, and direct flags — in that precedence order
//! (later wins). The fully resolved configuration is written next to the
//! other artifacts so every run is reproducible from its output
//! directory alone.
//!
//! All randomness flows from the single `seed` field; each component
//! derives its own seed by a labelled hash, so changing one stage never
//! reshuffles another.

use crate::errors::{CliError, CliResult};
use hiertext_core::data::{class_weights, Dataset};
use hiertext_core::features::FeaturizerConfig;
use hiertext_core::model::TrainConfig;
use hiertext_core::taxonomy::TaskLevel;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::PathBuf;

/// Named training-hyperparameter presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Profile {
    /// Reference hyperparameters: lr 2e-5, 6 epochs, batch size 6.
    /// Sized for fine-tuning a pretrained encoder; a fresh linear model
    /// will not converge under them.
    Paper,
    /// Linear-model hyperparameters: lr 0.05, 6 epochs, batch size 32.
    Desk,
}

impl Profile {
    pub fn train_config(self) -> TrainConfig {
        match self {
            Profile::Paper => TrainConfig::default(),
            Profile::Desk => TrainConfig {
                learning_rate: 0.05,
                batch_size: 32,
                ..TrainConfig::default()
            },
        }
    }
}

/// Holdout-split settings; the split seed derives from the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSettings {
    #[serde(default = "default_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_true")]
    pub stratify: bool,
}

fn default_fraction() -> f64 {
    0.8
}

fn default_true() -> bool {
    true
}

impl Default for SplitSettings {
    fn default() -> Self {
        Self {
            train_fraction: default_fraction(),
            stratify: default_true(),
        }
    }
}

/// How per-class loss weights are chosen: `"auto"` computes
/// n_samples/(n_classes·count) from the training portion, `"none"`
/// disables weighting, and an explicit array is passed through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassWeightMode {
    Auto,
    None,
    #[serde(untagged)]
    Explicit(Vec<f64>),
}

impl Default for ClassWeightMode {
    fn default() -> Self {
        ClassWeightMode::Auto
    }
}

impl ClassWeightMode {
    /// Resolves to the concrete weight vector for a training set.
    pub fn resolve(&self, train_ds: &Dataset) -> CliResult<Option<Vec<f64>>> {
        match self {
            ClassWeightMode::Auto => Ok(Some(class_weights(&train_ds.stats())?)),
            ClassWeightMode::None => Ok(None),
            ClassWeightMode::Explicit(w) => Ok(Some(w.clone())),
        }
    }
}

/// One run, fully specified. Serialized form is the config-file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Input CSV (EDOS schema); required by `train` and `cv`.
    #[serde(default)]
    pub data: Option<String>,
    #[serde(default = "default_level")]
    pub level: TaskLevel,
    /// Master seed; component seeds derive from it by label.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
    #[serde(default)]
    pub split: SplitSettings,
    /// Fold count for `cv`.
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub featurizer: FeaturizerConfig,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub class_weights: ClassWeightMode,
}

fn default_level() -> TaskLevel {
    TaskLevel::A
}

fn default_seed() -> u64 {
    42
}

fn default_out_dir() -> String {
    "hiertext_out".into()
}

fn default_k() -> usize {
    5
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: None,
            level: default_level(),
            seed: default_seed(),
            out_dir: default_out_dir(),
            split: SplitSettings::default(),
            k: default_k(),
            featurizer: FeaturizerConfig::default(),
            train: TrainConfig::default(),
            class_weights: ClassWeightMode::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if !(self.split.train_fraction > 0.0 && self.split.train_fraction < 1.0) {
            return Err(CliError::Usage(format!(
                "split.train_fraction must lie in (0,1), got {}",
                self.split.train_fraction
            )));
        }
        if self.k < 2 {
            return Err(CliError::Usage(format!("k must be at least 2, got {}", self.k)));
        }
        self.featurizer
            .validate()
            .map_err(|e| CliError::Usage(format!("featurizer: {e}")))?;
        self.train
            .validate()
            .map_err(|e| CliError::Usage(format!("train: {e}")))?;
        // Zero epochs is a valid library call (identity training) but a
        // pointless run, so the CLI treats it as misconfiguration.
        if self.train.epochs == 0 {
            return Err(CliError::Usage("train.epochs must be at least 1".into()));
        }
        Ok(())
    }

    /// The configured data path, required for training commands.
    pub fn data_path(&self) -> CliResult<PathBuf> {
        self.data
            .as_ref()
            .map(PathBuf::from)
            .ok_or_else(|| CliError::Usage("no input data configured (set `data` or --data)".into()))
    }
}

/// Flags shared by every config-driven command.
#[derive(Debug, clap::Args)]
pub struct ConfigArgs {
    /// JSON run-configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Training-hyperparameter preset applied under the config file.
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    /// Dotted-path config override, e.g. --set train.epochs=10; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Task level: A (binary), B (4 categories), or C (11 vectors).
    #[arg(long, value_parser = parse_level)]
    pub level: Option<TaskLevel>,
    /// Input CSV path (EDOS schema).
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
    /// Directory for artifacts (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Master seed for every random choice in the run.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn parse_level(s: &str) -> Result<TaskLevel, String> {
    s.parse()
}

/// Merges `overlay` into `base`: objects merge key-wise, everything else
/// replaces.
fn deep_merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (key, value) in o {
                match b.get_mut(&key) {
                    Some(slot) => deep_merge(slot, value),
                    None => {
                        b.insert(key, value);
                    }
                }
            }
        }
        (slot, value) => *slot = value,
    }
}

/// Sets `key` (a dotted path) to `raw` inside a JSON tree. The value is
/// parsed as JSON when possible and kept as a string otherwise, so
/// `--set train.epochs=10` and `--set level=B` both do what they say.
pub fn apply_override(root: &mut Value, key: &str, raw: &str) -> CliResult<()> {
    let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("--set: empty path segment in {key:?}")));
    }
    let mut cur = root;
    for (i, part) in parts.iter().enumerate() {
        let obj = cur.as_object_mut().ok_or_else(|| {
            CliError::Usage(format!(
                "--set {key}: {} does not name an object",
                parts[..i].join(".")
            ))
        })?;
        if i + 1 == parts.len() {
            obj.insert((*part).to_string(), value);
            return Ok(());
        }
        cur = obj
            .entry((*part).to_string())
            .or_insert_with(|| Value::Object(serde_json::Map::new()));
    }
    unreachable!("the loop returns on the last segment");
}

/// Builds the effective configuration: profile defaults, then the config
/// file, then --set pairs, then `extra` overrides from specific flags.
pub fn resolve(args: &ConfigArgs, extra: &[(String, Value)]) -> CliResult<RunConfig> {
    let mut base = RunConfig::default();
    if let Some(profile) = args.profile {
        base.train = profile.train_config();
    }
    let mut tree = serde_json::to_value(&base).expect("config serializes");

    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let overlay: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        deep_merge(&mut tree, overlay);
    }

    for pair in &args.set {
        let (key, raw) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {pair:?}")))?;
        apply_override(&mut tree, key, raw)?;
    }

    if let Some(level) = args.level {
        apply_override(&mut tree, "level", &level.to_string())?;
    }
    if let Some(data) = &args.data {
        apply_override(&mut tree, "data", &data.display().to_string())?;
    }
    if let Some(dir) = &args.out_dir {
        apply_override(&mut tree, "out_dir", &dir.display().to_string())?;
    }
    if let Some(seed) = args.seed {
        apply_override(&mut tree, "seed", &seed.to_string())?;
    }
    for (key, value) in extra {
        let raw = serde_json::to_string(value).expect("override serializes");
        apply_override(&mut tree, key, &raw)?;
    }

    let config: RunConfig = serde_json::from_value(tree)
        .map_err(|e| CliError::Usage(format!("config: {e}")))?;
    config.validate()?;
    Ok(config)
}

/// Creates the output directory and records the resolved configuration
/// inside it.
pub fn prepare_out_dir(config: &RunConfig) -> CliResult<PathBuf> {
    let dir = PathBuf::from(&config.out_dir);
    std::fs::create_dir_all(&dir).map_err(crate::errors::io_at(&dir))?;
    let path = dir.join("resolved_config.json");
    let json = serde_json::to_string_pretty(config).expect("config serializes");
    std::fs::write(&path, json + "\n").map_err(crate::errors::io_at(&path))?;
    Ok(dir)
}
