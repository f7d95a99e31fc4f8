//! Text-to-vector featurization: normalization, word/char n-gram
//! extraction, feature hashing, optional smoothed IDF, L2 normalization.
//!
//! Features are hashed rather than vocabulary-indexed: each n-gram is
//! FNV-1a-64 hashed over its UTF-8 bytes, preceded by a tag byte (0x01 for
//! word n-grams, 0x02 for char n-grams) so identical strings in the two
//! spaces do not collide by construction. The index is the hash reduced
//! modulo the (power-of-two) dimension. This keeps memory bounded, needs
//! no out-of-vocabulary handling, and is bit-reproducible everywhere.

use crate::data::Dataset;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use unicode_normalization::UnicodeNormalization;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01B3;
const WORD_TAG: u8 = 0x01;
const CHAR_TAG: u8 = 0x02;

fn fnv1a64_continue(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// FNV-1a 64-bit over a byte slice.
pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    fnv1a64_continue(FNV_OFFSET, bytes)
}

/// FNV-1a 64-bit with a leading tag byte selecting the feature space.
fn tagged_hash(tag: u8, bytes: &[u8]) -> u64 {
    fnv1a64_continue(fnv1a64(&[tag]), bytes)
}

/// Featurization hyperparameters. N-gram ranges are inclusive; `None`
/// disables that space entirely (at least one must be enabled).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeaturizerConfig {
    #[serde(default = "default_word_ngrams")]
    pub word_ngrams: Option<(u32, u32)>,
    #[serde(default = "default_char_ngrams")]
    pub char_ngrams: Option<(u32, u32)>,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default = "default_true")]
    pub use_idf: bool,
    #[serde(default = "default_true")]
    pub lowercase: bool,
}

fn default_word_ngrams() -> Option<(u32, u32)> {
    Some((1, 2))
}

fn default_char_ngrams() -> Option<(u32, u32)> {
    Some((3, 5))
}

fn default_dimension() -> usize {
    1 << 18
}

fn default_true() -> bool {
    true
}

impl Default for FeaturizerConfig {
    fn default() -> Self {
        Self {
            word_ngrams: default_word_ngrams(),
            char_ngrams: default_char_ngrams(),
            dimension: default_dimension(),
            use_idf: true,
            lowercase: true,
        }
    }
}

impl FeaturizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 || !self.dimension.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "feature dimension must be a power of two >= 2, got {}",
                self.dimension
            )));
        }
        for (name, range) in [("word_ngrams", self.word_ngrams), ("char_ngrams", self.char_ngrams)] {
            if let Some((lo, hi)) = range {
                if lo < 1 || lo > hi {
                    return Err(Error::InvalidConfig(format!(
                        "{name} range ({lo},{hi}) must satisfy 1 <= lo <= hi"
                    )));
                }
            }
        }
        if self.word_ngrams.is_none() && self.char_ngrams.is_none() {
            return Err(Error::InvalidConfig(
                "at least one of word_ngrams / char_ngrams must be enabled".into(),
            ));
        }
        Ok(())
    }
}

/// Unicode NFC normalization, optional lowercasing, and whitespace
/// collapse (runs of whitespace become single spaces; ends trimmed).
pub fn preprocess(text: &str, lowercase: bool) -> String {
    let nfc: String = text.nfc().collect();
    let cased = if lowercase { nfc.to_lowercase() } else { nfc };
    cased.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Hashed n-gram counts of a text under a config, keyed by dimension index.
fn hashed_counts(config: &FeaturizerConfig, text: &str) -> BTreeMap<u32, f64> {
    let pre = preprocess(text, config.lowercase);
    let mask = (config.dimension - 1) as u64;
    let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
    if let Some((lo, hi)) = config.word_ngrams {
        let tokens: Vec<&str> = pre.split(' ').filter(|t| !t.is_empty()).collect();
        for n in lo..=hi {
            for window in tokens.windows(n as usize) {
                let gram = window.join(" ");
                let idx = (tagged_hash(WORD_TAG, gram.as_bytes()) & mask) as u32;
                *counts.entry(idx).or_insert(0.0) += 1.0;
            }
        }
    }
    if let Some((lo, hi)) = config.char_ngrams {
        // Char n-grams run over the whole normalized string, spaces
        // included, so they capture word boundaries.
        let chars: Vec<char> = pre.chars().collect();
        let mut gram = String::new();
        for n in lo..=hi {
            for window in chars.windows(n as usize) {
                gram.clear();
                gram.extend(window.iter());
                let idx = (tagged_hash(CHAR_TAG, gram.as_bytes()) & mask) as u32;
                *counts.entry(idx).or_insert(0.0) += 1.0;
            }
        }
    }
    counts
}

/// A fitted featurizer: the config plus, when IDF is enabled, the
/// per-dimension inverse-document-frequency weights. Immutable after fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Featurizer {
    config: FeaturizerConfig,
    idf: Option<Vec<f64>>,
    fitted_on: usize,
}

impl Featurizer {
    /// Fits the featurizer on a corpus. With IDF enabled this computes
    /// idf[d] = ln((1 + N) / (1 + df_d)) + 1 over the N documents, where
    /// df_d counts documents with any n-gram hashing to dimension d.
    pub fn fit(config: FeaturizerConfig, corpus: &Dataset) -> Result<Self> {
        config.validate()?;
        let n_docs = corpus.len();
        let idf = if config.use_idf {
            if n_docs == 0 {
                return Err(Error::EmptyCorpus);
            }
            let mut df = vec![0usize; config.dimension];
            for ex in corpus.examples() {
                for &d in hashed_counts(&config, &ex.text).keys() {
                    df[d as usize] += 1;
                }
            }
            let n = n_docs as f64;
            Some(
                df.into_iter()
                    .map(|d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0)
                    .collect(),
            )
        } else {
            None
        };
        Ok(Self {
            config,
            idf,
            fitted_on: n_docs,
        })
    }

    /// Reassembles a featurizer from persisted parts, enforcing the
    /// shape invariants (idf present iff enabled, length = dimension).
    pub fn from_parts(
        config: FeaturizerConfig,
        idf: Option<Vec<f64>>,
        fitted_on: usize,
    ) -> Result<Self> {
        config.validate()?;
        match (&idf, config.use_idf) {
            (Some(v), true) if v.len() != config.dimension => {
                return Err(Error::DimensionMismatch {
                    expected: config.dimension,
                    got: v.len(),
                });
            }
            (Some(_), false) => {
                return Err(Error::InvalidConfig(
                    "idf weights supplied but use_idf is false".into(),
                ));
            }
            (None, true) => {
                return Err(Error::InvalidConfig(
                    "use_idf is true but no idf weights supplied".into(),
                ));
            }
            _ => {}
        }
        Ok(Self {
            config,
            idf,
            fitted_on,
        })
    }

    pub fn config(&self) -> &FeaturizerConfig {
        &self.config
    }

    pub fn idf(&self) -> Option<&[f64]> {
        self.idf.as_deref()
    }

    pub fn fitted_on(&self) -> usize {
        self.fitted_on
    }

    pub fn dimension(&self) -> usize {
        self.config.dimension
    }

    /// Maps a text to its L2-normalized hashed feature vector. An empty
    /// token set yields the zero vector.
    pub fn transform(&self, text: &str) -> FeatureVector {
        let counts = hashed_counts(&self.config, text);
        let mut indices = Vec::with_capacity(counts.len());
        let mut values = Vec::with_capacity(counts.len());
        for (idx, mut value) in counts {
            if let Some(idf) = &self.idf {
                value *= idf[idx as usize];
            }
            indices.push(idx);
            values.push(value);
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut values {
                *v /= norm;
            }
        }
        FeatureVector {
            indices,
            values,
            dimension: self.config.dimension,
        }
    }
}

/// A sparse unit-norm feature vector: strictly increasing indices with
/// matching positive values. The zero vector (no entries) represents an
/// empty token set.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    indices: Vec<u32>,
    values: Vec<f64>,
    dimension: usize,
}

impl FeatureVector {
    /// Builds a vector from (index, value) pairs, enforcing the
    /// invariants: indices strictly increasing and in range, values
    /// finite and positive.
    pub fn from_pairs(dimension: usize, pairs: &[(u32, f64)]) -> Result<Self> {
        let mut prev: Option<u32> = None;
        for &(idx, value) in pairs {
            if idx as usize >= dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: idx as usize,
                });
            }
            if prev.is_some_and(|p| p >= idx) {
                return Err(Error::InvalidConfig(
                    "feature indices must be strictly increasing".into(),
                ));
            }
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "feature values must be finite and positive, got {value}"
                )));
            }
            prev = Some(idx);
        }
        Ok(Self {
            indices: pairs.iter().map(|p| p.0).collect(),
            values: pairs.iter().map(|p| p.1).collect(),
            dimension,
        })
    }

    pub fn zero(dimension: usize) -> Self {
        Self {
            indices: Vec::new(),
            values: Vec::new(),
            dimension,
        }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&i, &v)| (i as usize, v))
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Dot product against a dense row of length `dimension`.
    pub fn dot(&self, row: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * row[i]).sum()
    }
}
