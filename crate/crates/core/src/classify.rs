//! Which intermediate `X_Δ(N)` have infinitely many quartic points.
//!
//! Infinitude comes from curated or computed sources of degree-4 maps. A
//! finiteness verdict needs gonality above 4 and either a finite Mordell–Weil
//! group of the Jacobian, or genus at least 8 and no degree-4 map to any
//! positive-rank elliptic curve of conductor dividing `N`.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::dataset::{CuratedFacts, CurveDataset};
use crate::degpairing::{
    gram_matrix, scale_for_cover, scale_for_isogeny, strong_weil_degree_delta,
};
use crate::error::{Error, Result};
use crate::modcurve::{signature, CurveSignature};
use crate::qform::{min_nonzero, represents};
use crate::units::{subgroups_containing_minus_one, DeltaSubgroup};

/// The degree whose points are being classified.
pub const TARGET_DEGREE: u64 = 4;

/// From this genus on, infinitely many quartic points force a degree-4 map to
/// `ℙ¹` or to a positive-rank elliptic curve.
pub const DEGREE4_MIN_GENUS: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Infinite,
    Finite,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Infinite => "infinite",
            Status::Finite => "finite",
            Status::Unknown => "unknown",
        })
    }
}

/// One step of a verdict's justification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// Genus 0 or 1 with a rational cusp.
    GenusAtMostOne {
        genus: u64,
    },
    /// Infinitely many quadratic points (the hyperelliptic `X_Δ(21)`).
    HyperellipticX21 {
        reason: String,
    },
    /// Infinitely many cubic points.
    InfinitelyManyCubicPoints {
        reason: String,
    },
    /// `ℚ`-gonality exactly 4.
    GonalityFour {
        reason: String,
    },
    /// Degree 2 over `X_0(N)`, which has infinitely many quadratic points.
    DegreeTwoCoverQuadraticX0 {
        index: u64,
    },
    CuratedSpecialCase {
        reason: String,
    },
    GenusAtLeast8 {
        genus: u64,
    },
    GonalityAboveFour {
        citation: String,
    },
    /// `J_Δ(N)(ℚ)` is finite, so infinitely many quartic points would need a
    /// degree-4 map to `ℙ¹`.
    FiniteJacobian,
    NoPositiveRankFactor,
    /// The minimal map to the class has degree not dividing 4.
    StrongWeilDegreeExceeds4 {
        curve: String,
        degrees: Vec<u64>,
    },
    /// No member of the class receives a degree-4 map: 4 is not a value of
    /// the scaled Gram form.
    GramFormOmits4 {
        curve: String,
        members: Vec<(String, u64, i64)>,
    },
    // blockers
    GenusBelow8Unresolved {
        genus: u64,
    },
    GonalityUnverified,
    DatasetIncomplete {
        level: u64,
        bound: u64,
    },
    KernelUnverified {
        curve: String,
    },
    FormulaNotApplicable {
        curve: String,
        reason: String,
    },
    DegreeFourMapPossible {
        curve: String,
    },
}

impl Rule {
    pub fn tag(&self) -> &'static str {
        match self {
            Rule::GenusAtMostOne { .. } => "GenusAtMostOne",
            Rule::HyperellipticX21 { .. } => "HyperellipticX21",
            Rule::InfinitelyManyCubicPoints { .. } => "InfinitelyManyCubicPoints",
            Rule::GonalityFour { .. } => "GonalityFour",
            Rule::DegreeTwoCoverQuadraticX0 { .. } => "DegreeTwoCoverQuadraticX0",
            Rule::CuratedSpecialCase { .. } => "CuratedSpecialCase",
            Rule::GenusAtLeast8 { .. } => "GenusAtLeast8",
            Rule::GonalityAboveFour { .. } => "GonalityAboveFour",
            Rule::FiniteJacobian => "FiniteJacobian",
            Rule::NoPositiveRankFactor => "NoPositiveRankFactor",
            Rule::StrongWeilDegreeExceeds4 { .. } => "StrongWeilDegreeExceeds4",
            Rule::GramFormOmits4 { .. } => "GramFormOmits4",
            Rule::GenusBelow8Unresolved { .. } => "GenusBelow8Unresolved",
            Rule::GonalityUnverified => "GonalityUnverified",
            Rule::DatasetIncomplete { .. } => "DatasetIncomplete",
            Rule::KernelUnverified { .. } => "KernelUnverified",
            Rule::FormulaNotApplicable { .. } => "FormulaNotApplicable",
            Rule::DegreeFourMapPossible { .. } => "DegreeFourMapPossible",
        }
    }

    pub fn is_infinitude(&self) -> bool {
        matches!(
            self,
            Rule::GenusAtMostOne { .. }
                | Rule::HyperellipticX21 { .. }
                | Rule::InfinitelyManyCubicPoints { .. }
                | Rule::GonalityFour { .. }
                | Rule::DegreeTwoCoverQuadraticX0 { .. }
                | Rule::CuratedSpecialCase { .. }
        )
    }

    pub fn is_blocker(&self) -> bool {
        matches!(
            self,
            Rule::GenusBelow8Unresolved { .. }
                | Rule::GonalityUnverified
                | Rule::DatasetIncomplete { .. }
                | Rule::KernelUnverified { .. }
                | Rule::FormulaNotApplicable { .. }
                | Rule::DegreeFourMapPossible { .. }
        )
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())?;
        match self {
            Rule::GenusAtMostOne { genus }
            | Rule::GenusAtLeast8 { genus }
            | Rule::GenusBelow8Unresolved { genus } => {
                write!(f, "(g={genus})")
            }
            Rule::HyperellipticX21 { reason }
            | Rule::InfinitelyManyCubicPoints { reason }
            | Rule::GonalityFour { reason }
            | Rule::CuratedSpecialCase { reason } => write!(f, "({reason})"),
            Rule::GonalityAboveFour { citation } => write!(f, "({citation})"),
            Rule::DegreeTwoCoverQuadraticX0 { index } => write!(f, "(index {index})"),
            Rule::StrongWeilDegreeExceeds4 { curve, degrees } => {
                write!(f, "({curve}, degree {degrees:?})")
            }
            Rule::GramFormOmits4 { curve, members } => {
                write!(f, "({curve}")?;
                for (l, iso, min) in members {
                    write!(f, "; {l} isogeny {iso} min {min}")?;
                }
                f.write_str(")")
            }
            Rule::DatasetIncomplete { level, bound } => {
                write!(f, "(level {level}, complete to {bound})")
            }
            Rule::KernelUnverified { curve } | Rule::DegreeFourMapPossible { curve } => {
                write!(f, "({curve})")
            }
            Rule::FormulaNotApplicable { curve, reason } => write!(f, "({curve}: {reason})"),
            Rule::NoPositiveRankFactor | Rule::GonalityUnverified | Rule::FiniteJacobian => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub n: u64,
    pub delta: DeltaSubgroup,
    pub genus: u64,
    pub status: Status,
    pub rules: Vec<Rule>,
}

impl Verdict {
    /// The first rule that kept the verdict from being decided.
    pub fn blocking_reason(&self) -> Option<&Rule> {
        self.rules.iter().find(|r| r.is_blocker())
    }
}

/// All intermediate `(N, Δ)` with `N` a quartic level of `X_0(N)`, in `(N, Δ)`
/// order.
pub fn candidate_pairs(facts: &CuratedFacts) -> Result<Vec<DeltaSubgroup>> {
    let mut out = Vec::new();
    for &n in &facts.quartic_x0_levels {
        if n < 3 || facts.no_intermediate_levels.contains(&n) {
            continue;
        }
        out.extend(
            subgroups_containing_minus_one(n)?
                .into_iter()
                .filter(DeltaSubgroup::is_intermediate),
        );
    }
    Ok(out)
}

/// Applies the rule pipeline. Holds only shared references; verdicts never
/// consult one another.
pub struct Classifier<'a> {
    pub dataset: &'a CurveDataset,
    pub facts: &'a CuratedFacts,
}

impl<'a> Classifier<'a> {
    pub fn new(dataset: &'a CurveDataset, facts: &'a CuratedFacts) -> Self {
        Self { dataset, facts }
    }

    pub fn verdict(&self, delta: &DeltaSubgroup) -> Result<Verdict> {
        let sig = signature(delta.modulus(), delta)?;
        self.verdict_with_signature(&sig)
    }

    /// The verdict given a precomputed signature; a wrong genus is not
    /// detected here.
    pub fn verdict_with_signature(&self, sig: &CurveSignature) -> Result<Verdict> {
        let delta = &sig.delta;
        let n = sig.n;
        if !delta.is_intermediate() {
            return Err(crate::error::domain!(
                "{delta} is not an intermediate subgroup mod {n}"
            ));
        }
        let mut rules = self.infinitude_rules(sig);
        let status = if !rules.is_empty() {
            Status::Infinite
        } else {
            self.finiteness(sig, &mut rules)?
        };
        Ok(Verdict {
            n,
            delta: delta.clone(),
            genus: sig.genus,
            status,
            rules,
        })
    }

    fn infinitude_rules(&self, sig: &CurveSignature) -> Vec<Rule> {
        let f = self.facts;
        let delta = &sig.delta;
        let mut rules = Vec::new();
        if sig.genus <= 1 {
            rules.push(Rule::GenusAtMostOne { genus: sig.genus });
        }
        if let Some(p) = f.quadratic(delta) {
            rules.push(Rule::HyperellipticX21 {
                reason: p.reason.clone(),
            });
        }
        if let Some(p) = f.cubic(delta) {
            rules.push(Rule::InfinitelyManyCubicPoints {
                reason: p.reason.clone(),
            });
        }
        if let Some(p) = f.gonality4(delta) {
            rules.push(Rule::GonalityFour {
                reason: p.reason.clone(),
            });
        }
        let index = delta.index_in_units();
        if index == 2 && f.x0_infinite_quadratic_levels.contains(&sig.n) {
            rules.push(Rule::DegreeTwoCoverQuadraticX0 { index });
        }
        if let Some(p) = f.special(delta) {
            rules.push(Rule::CuratedSpecialCase {
                reason: p.reason.clone(),
            });
        }
        rules
    }

    fn finiteness(&self, sig: &CurveSignature, rules: &mut Vec<Rule>) -> Result<Status> {
        let n = sig.n;
        let delta = &sig.delta;
        let gon = match &self.facts.gonality_gt4 {
            Some(g) => g,
            None => {
                rules.push(Rule::GonalityUnverified);
                return Ok(Status::Unknown);
            }
        };
        if sig.genus < DEGREE4_MIN_GENUS {
            if self.facts.finite_jacobian_levels.contains(&n) {
                rules.push(Rule::GonalityAboveFour {
                    citation: gon.citation.clone(),
                });
                rules.push(Rule::FiniteJacobian);
                return Ok(Status::Finite);
            }
            rules.push(Rule::GenusBelow8Unresolved { genus: sig.genus });
            return Ok(Status::Unknown);
        }
        rules.push(Rule::GenusAtLeast8 { genus: sig.genus });
        rules.push(Rule::GonalityAboveFour {
            citation: gon.citation.clone(),
        });
        let factors = match self.dataset.positive_rank_factors(n) {
            Ok(f) => f,
            Err(Error::Incomplete { level, bound }) => {
                rules.push(Rule::DatasetIncomplete { level, bound });
                return Ok(Status::Unknown);
            }
            Err(e) => return Err(e),
        };
        if factors.is_empty() {
            rules.push(Rule::NoPositiveRankFactor);
            return Ok(Status::Finite);
        }
        let index = delta.index_in_units();
        for factor in factors {
            let e = factor.strong_weil;
            if e.conductor == n {
                let deg = strong_weil_degree_delta(e, delta, self.facts.shimura_for(e))?;
                if deg.may_divide(TARGET_DEGREE) {
                    rules.push(Rule::DegreeFourMapPossible {
                        curve: e.label.clone(),
                    });
                    return Ok(Status::Unknown);
                }
                rules.push(Rule::StrongWeilDegreeExceeds4 {
                    curve: e.label.clone(),
                    degrees: deg.candidates(),
                });
                continue;
            }
            if !self.facts.kernel_verified(n, &e.label) {
                rules.push(Rule::KernelUnverified {
                    curve: e.label.clone(),
                });
                return Ok(Status::Unknown);
            }
            let form = match gram_matrix(e, n) {
                Ok(f) => scale_for_cover(&f, index)?,
                Err(Error::NotApplicable(reason)) => {
                    rules.push(Rule::FormulaNotApplicable {
                        curve: e.label.clone(),
                        reason,
                    });
                    return Ok(Status::Unknown);
                }
                Err(err) => return Err(err),
            };
            let mut members = Vec::new();
            for (m, iso) in &factor.members {
                let scaled = scale_for_isogeny(&form, *iso)?;
                if represents(&scaled.gram, TARGET_DEGREE as i64)?.is_some() {
                    rules.push(Rule::DegreeFourMapPossible {
                        curve: m.label.clone(),
                    });
                    return Ok(Status::Unknown);
                }
                members.push((m.label.clone(), *iso, min_nonzero(&scaled.gram)?.0));
            }
            rules.push(Rule::GramFormOmits4 {
                curve: e.label.clone(),
                members,
            });
        }
        Ok(Status::Finite)
    }
}

pub fn verdict(
    delta: &DeltaSubgroup,
    dataset: &CurveDataset,
    facts: &CuratedFacts,
) -> Result<Verdict> {
    Classifier::new(dataset, facts).verdict(delta)
}

/// Comparison of computed verdicts against the expected classification.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub matches: Vec<(u64, DeltaSubgroup)>,
    /// Expected infinite, computed otherwise.
    pub missing: Vec<(u64, DeltaSubgroup)>,
    /// Computed infinite, not expected.
    pub spurious: Vec<(u64, DeltaSubgroup)>,
    /// Undecided pairs with the blocking reason.
    pub unknown: Vec<(u64, DeltaSubgroup, String)>,
    /// Expected rows whose `Δ` is not a candidate at all.
    pub unmatched_rows: Vec<(u64, DeltaSubgroup)>,
    /// Expected rows whose printed genus disagrees with the computed one.
    pub genus_mismatches: Vec<(u64, DeltaSubgroup, u64, u64)>,
}

impl Report {
    /// The classification agrees; genus mismatches are reported separately.
    pub fn is_ok(&self) -> bool {
        self.missing.is_empty()
            && self.spurious.is_empty()
            && self.unknown.is_empty()
            && self.unmatched_rows.is_empty()
    }
}

/// Compare verdicts with `facts.expected`.
pub fn compare_with_expected(verdicts: &[Verdict], facts: &CuratedFacts) -> Report {
    let exp = &facts.expected;
    let listed: BTreeSet<&DeltaSubgroup> = exp.pairs.iter().map(|p| &p.delta).collect();
    let mut report = Report::default();
    let mut seen = BTreeSet::new();
    for v in verdicts {
        seen.insert(&v.delta);
        let expected = exp.blanket_levels.contains(&v.n) || listed.contains(&v.delta);
        let key = (v.n, v.delta.clone());
        match (v.status, expected) {
            (Status::Unknown, _) => {
                let why = v
                    .blocking_reason()
                    .map(|r| alloc::format!("{r}"))
                    .unwrap_or_default();
                report.unknown.push((v.n, v.delta.clone(), why));
            }
            (Status::Infinite, true) => report.matches.push(key),
            (Status::Infinite, false) => report.spurious.push(key),
            (Status::Finite, true) => report.missing.push(key),
            (Status::Finite, false) => {}
        }
    }
    for p in &exp.pairs {
        let n = p.delta.modulus();
        if !seen.contains(&p.delta) {
            report.unmatched_rows.push((n, p.delta.clone()));
        }
        if let (Some(g), Some(v)) = (p.genus, verdicts.iter().find(|v| v.delta == p.delta)) {
            if g != v.genus {
                report
                    .genus_mismatches
                    .push((n, p.delta.clone(), g, v.genus));
            }
        }
    }
    report
}

/// Classify every candidate sequentially and compare.
pub fn reproduce_main_table(
    dataset: &CurveDataset,
    facts: &CuratedFacts,
) -> Result<(Vec<Verdict>, Report)> {
    let c = Classifier::new(dataset, facts);
    let verdicts = candidate_pairs(facts)?
        .iter()
        .map(|d| c.verdict(d))
        .collect::<Result<Vec<_>>>()?;
    let report = compare_with_expected(&verdicts, facts);
    Ok((verdicts, report))
}
