//! Hierarchical text classification over the three-level sexism taxonomy:
//! data ingestion, hashed n-gram features, a focal-loss softmax classifier,
//! stratified cross-validation, ensembling, and macro-averaged evaluation.

pub mod data;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod features;
pub mod model;
pub mod predictions;
pub mod rng;
pub mod taxonomy;

pub use error::{Error, Result};
