//! Loader for the curated fact file (TOML).
//!
//! Every `Δ` is written as a generator list closed up with `−1`, together with
//! the expected size of the resulting group; a mismatch is a load error.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;
use xdelta_core::dataset::{
    CuratedFacts, CuratedPair, ExpectedClassification, ExpectedPair, GonalityAssertion,
};
use xdelta_core::degpairing::ShimuraRecord;
use xdelta_core::units::{parse_delta_spec, DeltaSubgroup};

use crate::{DataError, Result};

/// Levels in the fact file never exceed this.
pub const MAX_LEVEL: u64 = 200;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    version: u32,
    levels: Levels,
    gonality_gt4: Option<Gonality>,
    #[serde(default)]
    quadratic: Vec<PairEntry>,
    #[serde(default)]
    cubic: Vec<PairEntry>,
    #[serde(default)]
    gonality4: Vec<PairEntry>,
    #[serde(default)]
    special: Vec<PairEntry>,
    #[serde(default)]
    shimura: Vec<ShimuraEntry>,
    #[serde(default)]
    verified_kernel: Vec<KernelEntry>,
    expected: Option<Expected>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Levels {
    quartic_x0: Vec<u64>,
    no_intermediate: Vec<u64>,
    x0_infinite_quadratic: Vec<u64>,
    rank0: Vec<u64>,
    #[serde(default)]
    finite_jacobian: Vec<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Gonality {
    citation: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairEntry {
    level: u64,
    delta: String,
    size: usize,
    #[serde(default)]
    reason: String,
    genus: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShimuraEntry {
    level: u64,
    label: Option<String>,
    order: u64,
    structure: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelEntry {
    level: u64,
    curve: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Expected {
    blanket_levels: Vec<u64>,
    #[serde(default)]
    pair: Vec<PairEntry>,
}

fn level_set(name: &str, v: &[u64]) -> Result<BTreeSet<u64>> {
    if let Some(n) = v.iter().find(|&&n| n == 0 || n > MAX_LEVEL) {
        return Err(DataError::Facts(format!(
            "{name}: level {n} outside 1..={MAX_LEVEL}"
        )));
    }
    Ok(v.iter().copied().collect())
}

fn delta(e: &PairEntry) -> Result<DeltaSubgroup> {
    let d = parse_delta_spec(e.level, &e.delta, true)
        .map_err(|err| DataError::Facts(format!("level {} Δ {:?}: {err}", e.level, e.delta)))?;
    if d.len() != e.size {
        return Err(DataError::Facts(format!(
            "level {} Δ {:?} generates a group of size {}, expected {}",
            e.level,
            e.delta,
            d.len(),
            e.size
        )));
    }
    Ok(d)
}

fn pairs(v: &[PairEntry]) -> Result<Vec<CuratedPair>> {
    v.iter()
        .map(|e| {
            Ok(CuratedPair {
                delta: delta(e)?,
                reason: e.reason.clone(),
            })
        })
        .collect()
}

/// `"C2×C4"` or `"C2xC4"` to its order.
fn structure_order(s: &str) -> Option<u64> {
    s.split(['×', 'x', '*'])
        .map(|c| c.trim().strip_prefix('C')?.parse::<u64>().ok())
        .product()
}

pub fn parse_facts(text: &str) -> Result<CuratedFacts> {
    let f: File = toml::from_str(text).map_err(|e| DataError::Facts(e.to_string()))?;
    if f.version != 1 {
        return Err(DataError::Facts(format!(
            "unsupported version {}",
            f.version
        )));
    }
    let mut shimura_table = Vec::new();
    for s in &f.shimura {
        if structure_order(&s.structure) != Some(s.order) {
            return Err(DataError::Facts(format!(
                "level {}: {} does not have order {}",
                s.level, s.structure, s.order
            )));
        }
        shimura_table.push(ShimuraRecord {
            conductor: s.level,
            label: s.label.clone(),
            group_order: s.order,
            group_structure: s.structure.clone(),
        });
    }
    let expected = match &f.expected {
        Some(e) => ExpectedClassification {
            blanket_levels: level_set("expected.blanket_levels", &e.blanket_levels)?,
            pairs: e
                .pair
                .iter()
                .map(|p| {
                    Ok(ExpectedPair {
                        delta: delta(p)?,
                        genus: p.genus,
                    })
                })
                .collect::<Result<_>>()?,
        },
        None => ExpectedClassification::default(),
    };
    let facts = CuratedFacts {
        quartic_x0_levels: level_set("quartic_x0", &f.levels.quartic_x0)?,
        no_intermediate_levels: level_set("no_intermediate", &f.levels.no_intermediate)?,
        x0_infinite_quadratic_levels: level_set(
            "x0_infinite_quadratic",
            &f.levels.x0_infinite_quadratic,
        )?,
        rank0_levels: level_set("rank0", &f.levels.rank0)?,
        finite_jacobian_levels: level_set("finite_jacobian", &f.levels.finite_jacobian)?,
        quadratic_pairs: pairs(&f.quadratic)?,
        cubic_pairs: pairs(&f.cubic)?,
        gonality4_pairs: pairs(&f.gonality4)?,
        special_infinite_pairs: pairs(&f.special)?,
        shimura_table,
        verified_kernel_pairs: f
            .verified_kernel
            .iter()
            .map(|k| (k.level, k.curve.clone()))
            .collect(),
        gonality_gt4: f.gonality_gt4.map(|g| GonalityAssertion {
            citation: g.citation,
        }),
        expected,
    };
    facts.validate()?;
    Ok(facts)
}

pub fn load_facts(path: impl AsRef<Path>) -> Result<CuratedFacts> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.into(),
        source,
    })?;
    parse_facts(&text)
}
