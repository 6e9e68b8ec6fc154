//! In-memory curve dataset and the curated facts the classifier relies on.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::degpairing::ShimuraRecord;
use crate::ellcurve::EllipticCurveRecord;
use crate::error::{domain, Error, Result};
use crate::units::DeltaSubgroup;

/// Elliptic curves over `ℚ`, complete for every isogeny class of conductor
/// up to `completeness_bound` except at the conductors in `missing`.
#[derive(Debug, Clone, Default)]
pub struct CurveDataset {
    curves: Vec<EllipticCurveRecord>,
    by_label: BTreeMap<String, usize>,
    completeness_bound: u64,
    missing: BTreeSet<u64>,
}

/// A positive-rank isogeny class: its optimal curve and every member with
/// the minimal isogeny degree from the optimal curve.
#[derive(Debug, Clone)]
pub struct PositiveRankFactor<'a> {
    pub strong_weil: &'a EllipticCurveRecord,
    pub members: Vec<(&'a EllipticCurveRecord, u64)>,
}

impl CurveDataset {
    /// Validate records. A class whose isogeny partners are absent marks its
    /// conductor as incomplete rather than failing.
    pub fn new(curves: Vec<EllipticCurveRecord>, completeness_bound: u64) -> Result<Self> {
        let mut by_label = BTreeMap::new();
        for (i, c) in curves.iter().enumerate() {
            c.validate()?;
            if by_label.insert(c.label.clone(), i).is_some() {
                return Err(domain!("duplicate label {}", c.label));
            }
        }
        let mut missing = BTreeSet::new();
        for c in &curves {
            if c.isogeny_degrees.keys().any(|l| !by_label.contains_key(l)) {
                missing.insert(c.conductor);
            }
        }
        Ok(Self {
            curves,
            by_label,
            completeness_bound,
            missing,
        })
    }

    pub fn curves(&self) -> &[EllipticCurveRecord] {
        &self.curves
    }

    pub fn completeness_bound(&self) -> u64 {
        self.completeness_bound
    }

    /// Conductors below the bound known to be missing curves.
    pub fn missing_conductors(&self) -> &BTreeSet<u64> {
        &self.missing
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn get(&self, label: &str) -> Result<&EllipticCurveRecord> {
        self.by_label
            .get(label)
            .map(|&i| &self.curves[i])
            .ok_or_else(|| Error::UnknownCurve(label.into()))
    }

    /// Drop one curve; its conductor is no longer complete.
    pub fn without_curve(&self, label: &str) -> Result<Self> {
        let gone = self.get(label)?.conductor;
        let curves = self
            .curves
            .iter()
            .filter(|c| c.label != label)
            .cloned()
            .collect();
        let mut out = Self::new(curves, self.completeness_bound)?;
        out.missing.extend(self.missing.iter().copied());
        out.missing.insert(gone);
        Ok(out)
    }

    /// Does the dataset contain every class of conductor dividing `n`?
    pub fn covers(&self, n: u64) -> Result<()> {
        if n > self.completeness_bound {
            return Err(Error::Incomplete {
                level: n,
                bound: self.completeness_bound,
            });
        }
        if let Some(&m) = self.missing.iter().find(|&&m| n.is_multiple_of(m)) {
            return Err(Error::Incomplete {
                level: n,
                bound: m - 1,
            });
        }
        Ok(())
    }

    /// The optimal curve of a class: least modular degree, then label.
    pub fn strong_weil_curve(&self, class: &str) -> Result<&EllipticCurveRecord> {
        self.curves
            .iter()
            .filter(|c| c.isogeny_class == class)
            .min_by(|a, b| (a.modular_degree, &a.label).cmp(&(b.modular_degree, &b.label)))
            .ok_or_else(|| Error::UnknownCurve(class.into()))
    }

    /// Positive-rank classes of conductor dividing `n`, ordered by conductor
    /// and class label.
    pub fn positive_rank_factors(&self, n: u64) -> Result<Vec<PositiveRankFactor<'_>>> {
        self.covers(n)?;
        let mut classes: BTreeMap<(u64, &str), Vec<&EllipticCurveRecord>> = BTreeMap::new();
        for c in &self.curves {
            if n.is_multiple_of(c.conductor) && c.rank > 0 {
                classes
                    .entry((c.conductor, c.isogeny_class.as_str()))
                    .or_default()
                    .push(c);
            }
        }
        let mut out = Vec::new();
        for ((_, class), members) in classes {
            let sw = self.strong_weil_curve(class)?;
            let mut ms = Vec::new();
            for m in members {
                let deg = sw.isogeny_degree_to(&m.label).ok_or_else(|| {
                    Error::InvariantViolation(alloc::format!(
                        "no isogeny degree from {} to {}",
                        sw.label,
                        m.label
                    ))
                })?;
                ms.push((m, deg));
            }
            out.push(PositiveRankFactor {
                strong_weil: sw,
                members: ms,
            });
        }
        Ok(out)
    }
}

/// An `(N, Δ)` pair singled out by a curated fact, with its reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuratedPair {
    pub delta: DeltaSubgroup,
    pub reason: String,
}

/// The external gonality statement used for finiteness: every candidate not
/// covered by an infinitude fact has `ℚ`-gonality above 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GonalityAssertion {
    pub citation: String,
}

/// One row of the expected classification table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedPair {
    pub delta: DeltaSubgroup,
    pub genus: Option<u64>,
}

/// The expected set of `(N, Δ)` with infinitely many quartic points: every
/// intermediate `Δ` at a blanket level plus the listed pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpectedClassification {
    pub blanket_levels: BTreeSet<u64>,
    pub pairs: Vec<ExpectedPair>,
}

/// Tables taken from the literature that the classifier consults.
#[derive(Debug, Clone, Default)]
pub struct CuratedFacts {
    /// `X_0(N)` has infinitely many quartic points.
    pub quartic_x0_levels: BTreeSet<u64>,
    /// `(ℤ/Nℤ)^×` has no subgroup strictly between `{±1}` and itself.
    pub no_intermediate_levels: BTreeSet<u64>,
    /// Intermediate curves of genus at least 2 with infinitely many quadratic points.
    pub quadratic_pairs: Vec<CuratedPair>,
    /// Intermediate curves of genus at least 2 with infinitely many cubic points.
    pub cubic_pairs: Vec<CuratedPair>,
    /// `ℚ`-gonality exactly 4.
    pub gonality4_pairs: Vec<CuratedPair>,
    /// `X_0(N)` has infinitely many quadratic points.
    pub x0_infinite_quadratic_levels: BTreeSet<u64>,
    /// Degree-4 maps to `ℙ¹` or to a positive-rank curve found case by case.
    pub special_infinite_pairs: Vec<CuratedPair>,
    /// No positive-rank elliptic curve of conductor dividing `N`.
    pub rank0_levels: BTreeSet<u64>,
    /// `J_1(N)(ℚ)` is finite, hence so is every `J_Δ(N)(ℚ)`.
    pub finite_jacobian_levels: BTreeSet<u64>,
    pub shimura_table: Vec<ShimuraRecord>,
    /// `(N, label)` with `E^{σ_0(N/M)} → J_Δ(N)` injective for every `Δ`.
    pub verified_kernel_pairs: Vec<(u64, String)>,
    pub gonality_gt4: Option<GonalityAssertion>,
    pub expected: ExpectedClassification,
}

fn find<'a>(list: &'a [CuratedPair], delta: &DeltaSubgroup) -> Option<&'a CuratedPair> {
    list.iter().find(|p| &p.delta == delta)
}

impl CuratedFacts {
    pub fn quadratic(&self, delta: &DeltaSubgroup) -> Option<&CuratedPair> {
        find(&self.quadratic_pairs, delta)
    }

    pub fn cubic(&self, delta: &DeltaSubgroup) -> Option<&CuratedPair> {
        find(&self.cubic_pairs, delta)
    }

    pub fn gonality4(&self, delta: &DeltaSubgroup) -> Option<&CuratedPair> {
        find(&self.gonality4_pairs, delta)
    }

    pub fn special(&self, delta: &DeltaSubgroup) -> Option<&CuratedPair> {
        find(&self.special_infinite_pairs, delta)
    }

    pub fn kernel_verified(&self, n: u64, label: &str) -> bool {
        self.verified_kernel_pairs
            .iter()
            .any(|(m, l)| *m == n && l == label)
    }

    /// `Σ(N) ∩ E` for an optimal curve, if tabulated. Rows without a label
    /// match every curve of their level, taking the largest order.
    pub fn shimura_for(&self, e: &EllipticCurveRecord) -> Option<&ShimuraRecord> {
        if let Some(r) = self
            .shimura_table
            .iter()
            .find(|r| r.label.as_deref() == Some(e.label.as_str()))
        {
            return Some(r);
        }
        self.shimura_table
            .iter()
            .filter(|r| r.conductor == e.conductor && r.label.is_none())
            .max_by_key(|r| r.group_order)
    }

    /// Every `Δ` key names a subgroup of its own modulus containing `−1`.
    pub fn validate(&self) -> Result<()> {
        let lists = [
            &self.quadratic_pairs,
            &self.cubic_pairs,
            &self.gonality4_pairs,
            &self.special_infinite_pairs,
        ];
        for list in lists {
            for p in list.iter() {
                if !p.delta.contains(p.delta.modulus() - 1) || !p.delta.is_intermediate() {
                    return Err(domain!(
                        "{} mod {} is not an intermediate Δ",
                        p.delta,
                        p.delta.modulus()
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellcurve::curve;
    use alloc::vec;

    fn small() -> CurveDataset {
        let mut a = curve("11a1", [0, -1, 1, -10, -20], 11, 0, 1);
        let mut b = curve("11a2", [0, -1, 1, -7820, -263580], 11, 0, 5);
        let mut c = curve("11a3", [0, -1, 1, 0, 0], 11, 0, 5);
        a.isogeny_degrees = [("11a2".into(), 5), ("11a3".into(), 5)].into();
        b.isogeny_degrees = [("11a1".into(), 5), ("11a3".into(), 25)].into();
        c.isogeny_degrees = [("11a1".into(), 5), ("11a2".into(), 25)].into();
        let d = curve("37a1", [0, 0, 1, -1, 0], 37, 1, 2);
        CurveDataset::new(vec![a, b, c, d], 40).unwrap()
    }

    #[test]
    fn lookups() {
        let ds = small();
        assert_eq!(ds.get("37a1").unwrap().rank, 1);
        assert!(matches!(ds.get("999zzz9"), Err(Error::UnknownCurve(_))));
        assert_eq!(ds.strong_weil_curve("11a").unwrap().label, "11a1");
    }

    #[test]
    fn positive_rank_factors_respect_completeness() {
        let ds = small();
        let f = ds.positive_rank_factors(37).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].strong_weil.label, "37a1");
        assert!(ds.positive_rank_factors(22).unwrap().is_empty());
        assert!(matches!(
            ds.positive_rank_factors(74),
            Err(Error::Incomplete { .. })
        ));
        let cut = ds.without_curve("37a1").unwrap();
        assert!(matches!(
            cut.positive_rank_factors(37),
            Err(Error::Incomplete { .. })
        ));
        assert!(cut.positive_rank_factors(33).is_ok());
        let partial = ds.without_curve("11a3").unwrap();
        assert!(partial.positive_rank_factors(22).is_err());
    }

    #[test]
    fn rejects_duplicates() {
        let d = curve("37a1", [0, 0, 1, -1, 0], 37, 1, 2);
        assert!(CurveDataset::new(vec![d.clone(), d], 40).is_err());
        assert!(CurveDataset::new(Vec::new(), 0).unwrap().is_empty());
    }
}
