//! One module per subcommand; each exposes a clap `Args` struct and a
//! `run` entry point returning the shared [`CliResult`].
//!
//! [`CliResult`]: crate::errors::CliResult

pub mod cv;
pub mod ensemble;
pub mod evaluate;
pub mod predict;
pub mod taxonomy;
pub mod train;

use crate::errors::{io_at, CliResult};
use hiertext_core::data::Dataset;
use hiertext_core::predictions::PredictionSet;
use serde::Serialize;
use std::collections::HashMap;
use std::path::Path;

/// Writes pretty JSON with a trailing newline — the format of every JSON
/// artifact the CLI emits.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let json = serde_json::to_string_pretty(value)
        .expect("artifact types serialize without error");
    std::fs::write(path, json + "\n").map_err(io_at(path))?;
    Ok(())
}

/// Writes one id per line.
pub fn write_id_list<'a>(
    path: &Path,
    ids: impl Iterator<Item = &'a str>,
) -> CliResult<()> {
    let mut text = String::new();
    for id in ids {
        text.push_str(id);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(io_at(path))?;
    Ok(())
}

/// Rebuilds the gold dataset in prediction order, so a prediction file
/// covering a subset of the gold rows (e.g. a holdout or a gated stage)
/// can be scored. Extra gold rows are dropped; a predicted id missing
/// from the gold file is an error.
pub fn align_gold(gold: &Dataset, preds: &PredictionSet) -> CliResult<Dataset> {
    let position: HashMap<&str, usize> =
        gold.ids().enumerate().map(|(i, id)| (id, i)).collect();
    let mut indices = Vec::with_capacity(preds.len());
    for id in preds.ids() {
        let &pos = position.get(id.as_str()).ok_or_else(|| {
            hiertext_core::Error::Misaligned(format!(
                "predicted id {id:?} does not appear in the gold file"
            ))
        })?;
        indices.push(pos);
    }
    Ok(gold.subset(&indices))
}
