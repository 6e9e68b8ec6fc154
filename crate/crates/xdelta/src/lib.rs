//! File formats, remote lookup and parallel drivers around [`xdelta_core`].

pub mod dataset;
pub mod facts;
pub mod remote;

use std::path::PathBuf;

use rayon::prelude::*;
use xdelta_core::classify::{candidate_pairs, compare_with_expected, Classifier, Report, Verdict};
use xdelta_core::dataset::{CuratedFacts, CurveDataset};

pub use xdelta_core;

/// Errors from loading or fetching data.
#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("row {row}: {msg}")]
    Row { row: u64, msg: String },
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("facts: {0}")]
    Facts(String),
    #[error("network error fetching {label}: {msg}")]
    Network { label: String, msg: String },
    #[error("unknown curve label {0}")]
    UnknownLabel(String),
    #[error("response for {label} does not match the record schema: {msg}")]
    SchemaDrift { label: String, msg: String },
    #[error("offline and {0} is not cached")]
    Offline(String),
    #[error(transparent)]
    Core(#[from] xdelta_core::Error),
}

pub type Result<T, E = DataError> = std::result::Result<T, E>;

/// The dataset shipped with the crate.
pub fn bundled_dataset() -> Result<CurveDataset> {
    dataset::parse_dataset(include_str!("../data/curves.csv"))
}

pub fn bundled_facts() -> Result<CuratedFacts> {
    facts::parse_facts(include_str!("../data/facts.toml"))
}

/// `XDQ_DATA` if set, else the bundled file.
pub fn dataset_from_env() -> Result<CurveDataset> {
    match std::env::var_os("XDQ_DATA") {
        Some(p) if !p.is_empty() => dataset::load_dataset(p),
        _ => bundled_dataset(),
    }
}

/// Verdicts for every candidate, computed in parallel and returned in
/// candidate order.
pub fn classify_all(ds: &CurveDataset, facts: &CuratedFacts) -> Result<Vec<Verdict>> {
    let c = Classifier::new(ds, facts);
    let pairs = candidate_pairs(facts)?;
    let out: xdelta_core::Result<Vec<Verdict>> = pairs.par_iter().map(|d| c.verdict(d)).collect();
    Ok(out?)
}

pub fn reproduce_main_table(
    ds: &CurveDataset,
    facts: &CuratedFacts,
) -> Result<(Vec<Verdict>, Report)> {
    let v = classify_all(ds, facts)?;
    let r = compare_with_expected(&v, facts);
    Ok((v, r))
}
