//! The curve CSV format.
//!
//! ```text
//! # completeness_bound: 200
//! label,conductor,a1,a2,a3,a4,a6,rank,analytic_rank,modular_degree,isogeny_class,isogeny_degrees
//! 11a1,11,0,-1,1,-10,-20,0,0,1,11a,11a2:5;11a3:5
//! ```
//!
//! The bound comment is optional; without it the bound is 0.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use xdelta_core::dataset::CurveDataset;
use xdelta_core::ellcurve::EllipticCurveRecord;

use crate::{DataError, Result};

pub const HEADER: [&str; 12] = [
    "label",
    "conductor",
    "a1",
    "a2",
    "a3",
    "a4",
    "a6",
    "rank",
    "analytic_rank",
    "modular_degree",
    "isogeny_class",
    "isogeny_degrees",
];

const BOUND_KEY: &str = "completeness_bound:";

/// One record in the flat field layout shared by the CSV and the remote JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub conductor: u64,
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
    pub rank: u32,
    pub analytic_rank: u32,
    pub modular_degree: u64,
    pub isogeny_class: String,
    #[serde(default)]
    pub isogeny_degrees: String,
}

impl Row {
    pub fn into_record(self) -> std::result::Result<EllipticCurveRecord, String> {
        let mut isogeny_degrees = BTreeMap::new();
        for part in self
            .isogeny_degrees
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
        {
            let (l, d) = part
                .split_once(':')
                .ok_or_else(|| format!("bad isogeny entry {part:?}"))?;
            let d: u64 = d
                .trim()
                .parse()
                .map_err(|_| format!("bad isogeny degree in {part:?}"))?;
            if isogeny_degrees.insert(l.trim().to_string(), d).is_some() {
                return Err(format!("isogeny partner {l} listed twice"));
            }
        }
        let rec = EllipticCurveRecord {
            label: self.label,
            a: [self.a1, self.a2, self.a3, self.a4, self.a6],
            conductor: self.conductor,
            rank: self.rank,
            analytic_rank: self.analytic_rank,
            modular_degree: self.modular_degree,
            isogeny_class: self.isogeny_class,
            isogeny_degrees,
        };
        rec.validate().map_err(|e| e.to_string())?;
        Ok(rec)
    }

    pub fn from_record(e: &EllipticCurveRecord) -> Self {
        let [a1, a2, a3, a4, a6] = e.a;
        let isogeny_degrees = e
            .isogeny_degrees
            .iter()
            .map(|(l, d)| format!("{l}:{d}"))
            .collect::<Vec<_>>()
            .join(";");
        Row {
            label: e.label.clone(),
            conductor: e.conductor,
            a1,
            a2,
            a3,
            a4,
            a6,
            rank: e.rank,
            analytic_rank: e.analytic_rank,
            modular_degree: e.modular_degree,
            isogeny_class: e.isogeny_class.clone(),
            isogeny_degrees,
        }
    }
}

fn read_bound(text: &str) -> Result<u64> {
    for line in text.lines().take_while(|l| l.trim_start().starts_with('#')) {
        if let Some(v) = line.trim_start_matches('#').trim().strip_prefix(BOUND_KEY) {
            return v
                .trim()
                .parse()
                .map_err(|_| DataError::Dataset(format!("bad completeness bound {v:?}")));
        }
    }
    Ok(0)
}

/// Parse CSV text. Row numbers in errors count data rows from 1.
pub fn parse_dataset(text: &str) -> Result<CurveDataset> {
    if text
        .trim()
        .lines()
        .all(|l| l.trim().is_empty() || l.trim_start().starts_with('#'))
    {
        return Ok(CurveDataset::new(Vec::new(), read_bound(text)?)?);
    }
    let bound = read_bound(text)?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| DataError::Dataset(e.to_string()))?
        .clone();
    for col in HEADER {
        if !headers.iter().any(|h| h == col) {
            return Err(DataError::Dataset(format!("missing column {col}")));
        }
    }
    let mut seen = HashSet::new();
    let mut curves = Vec::new();
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let row_no = i as u64 + 1;
        let row = row.map_err(|e| DataError::Row {
            row: row_no,
            msg: e.to_string(),
        })?;
        if !seen.insert(row.label.clone()) {
            return Err(DataError::Row {
                row: row_no,
                msg: format!("duplicate label {}", row.label),
            });
        }
        curves.push(
            row.into_record()
                .map_err(|msg| DataError::Row { row: row_no, msg })?,
        );
    }
    Ok(CurveDataset::new(curves, bound)?)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<CurveDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.into(),
        source,
    })?;
    parse_dataset(&text)
}

/// CSV text that [`parse_dataset`] reads back to the same dataset.
pub fn serialize_dataset(ds: &CurveDataset) -> Result<String> {
    let mut out = format!("# {BOUND_KEY} {}\n", ds.completeness_bound());
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(HEADER)
        .map_err(|e| DataError::Dataset(e.to_string()))?;
    for c in ds.curves() {
        w.serialize(Row::from_record(c))
            .map_err(|e| DataError::Dataset(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| DataError::Dataset(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is UTF-8"));
    Ok(out)
}
