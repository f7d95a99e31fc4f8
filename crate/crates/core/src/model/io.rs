//! Binary model persistence.
//!
//! Layout: magic "HTXM", version (u16 LE), header length (u32 LE), a JSON
//! header (level, class keys, featurizer config, training metadata),
//! then little-endian f64 arrays — weights row-major, bias, and the idf
//! vector when present — and finally a CRC32 (IEEE) over everything
//! before it. The header carries no timestamps, so saving the same model
//! twice produces byte-identical files.

use crate::error::{Error, Result};
use crate::features::{Featurizer, FeaturizerConfig};
use crate::model::{ModelParams, TrainConfig};
use crate::taxonomy::{parse_label, Label, TaskLevel, Taxonomy};
use serde::{Deserialize, Serialize};
use std::path::Path;

const MAGIC: &[u8; 4] = b"HTXM";
const VERSION: u16 = 1;

/// Bitwise CRC32 (IEEE 802.3, reflected, polynomial 0xEDB88320).
pub(crate) fn crc32(bytes: &[u8]) -> u32 {
    let mut crc = 0xFFFF_FFFFu32;
    for &b in bytes {
        crc ^= u32::from(b);
        for _ in 0..8 {
            let mask = (crc & 1).wrapping_neg();
            crc = (crc >> 1) ^ (0xEDB8_8320 & mask);
        }
    }
    !crc
}

/// Everything needed to predict: parameters, the fitted featurizer, and
/// the training configuration the model was produced with (if known).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub params: ModelParams,
    pub featurizer: Featurizer,
    pub train_config: Option<TrainConfig>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    level: TaskLevel,
    class_list: Vec<String>,
    dimension: usize,
    featurizer: FeaturizerConfig,
    has_idf: bool,
    fitted_on: usize,
    train_config: Option<TrainConfig>,
}

fn push_f64s(buf: &mut Vec<u8>, values: &[f64]) {
    buf.reserve(values.len() * 8);
    for &v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    if model.featurizer.dimension() != model.params.dimension() {
        return Err(Error::DimensionMismatch {
            expected: model.params.dimension(),
            got: model.featurizer.dimension(),
        });
    }
    let header = Header {
        level: model.params.level(),
        class_list: model.params.class_list().iter().map(Label::key).collect(),
        dimension: model.params.dimension(),
        featurizer: model.featurizer.config().clone(),
        has_idf: model.featurizer.idf().is_some(),
        fitted_on: model.featurizer.fitted_on(),
        train_config: model.train_config.clone(),
    };
    let header_bytes = serde_json::to_vec(&header)?;
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(header_bytes.len() as u32).to_le_bytes());
    buf.extend_from_slice(&header_bytes);
    push_f64s(&mut buf, model.params.weights());
    push_f64s(&mut buf, model.params.bias());
    if let Some(idf) = model.featurizer.idf() {
        push_f64s(&mut buf, idf);
    }
    let crc = crc32(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    std::fs::write(path, buf)?;
    Ok(())
}

fn corrupt(reason: impl Into<String>) -> Error {
    Error::CorruptModel(reason.into())
}

fn read_f64s(bytes: &[u8]) -> Vec<f64> {
    bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunks_exact yields 8 bytes")))
        .collect()
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < MAGIC.len() + 2 + 4 {
        return Err(corrupt("file shorter than the fixed preamble"));
    }
    if &bytes[..4] != MAGIC {
        return Err(corrupt("bad magic; not a model file"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(corrupt(format!("unsupported version {version}")));
    }
    let header_len = u32::from_le_bytes([bytes[6], bytes[7], bytes[8], bytes[9]]) as usize;
    let header_end = 10 + header_len;
    if bytes.len() < header_end {
        return Err(corrupt("truncated header"));
    }
    let header: Header = serde_json::from_slice(&bytes[10..header_end])
        .map_err(|e| corrupt(format!("unreadable header: {e}")))?;

    let class_list = Taxonomy::class_list(header.level);
    if class_list.len() != header.class_list.len()
        || class_list
            .iter()
            .zip(&header.class_list)
            .any(|(canonical, stored)| {
                parse_label(stored, header.level).ok() != Some(*canonical)
            })
    {
        return Err(corrupt("class list does not match the level's taxonomy"));
    }

    let k = class_list.len();
    let dim = header.dimension;
    let n_floats = k * dim + k + if header.has_idf { dim } else { 0 };
    let expected_len = header_end + n_floats * 8 + 4;
    if bytes.len() != expected_len {
        return Err(corrupt(format!(
            "expected {expected_len} bytes, found {}",
            bytes.len()
        )));
    }
    let body_end = bytes.len() - 4;
    let stored_crc = u32::from_le_bytes(bytes[body_end..].try_into().expect("4 bytes remain"));
    if crc32(&bytes[..body_end]) != stored_crc {
        return Err(corrupt("checksum mismatch"));
    }

    let mut cursor = header_end;
    let mut take = |count: usize| {
        let slice = &bytes[cursor..cursor + count * 8];
        cursor += count * 8;
        read_f64s(slice)
    };
    let weights = take(k * dim);
    let bias = take(k);
    let idf = header.has_idf.then(|| take(dim));

    let params = ModelParams::from_parts(class_list, dim, weights, bias)
        .map_err(|e| corrupt(format!("invalid parameters: {e}")))?;
    let featurizer = Featurizer::from_parts(header.featurizer, idf, header.fitted_on)
        .map_err(|e| corrupt(format!("invalid featurizer: {e}")))?;
    if featurizer.dimension() != params.dimension() {
        return Err(corrupt("featurizer and parameter dimensions disagree"));
    }
    Ok(TrainedModel {
        params,
        featurizer,
        train_config: header.train_config,
    })
}
