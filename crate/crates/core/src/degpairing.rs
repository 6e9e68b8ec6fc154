//! Degree pairing on maps `X_Δ(N) → E`.
//!
//! For `E` of conductor `M | N` with modular parametrization `f`, the maps
//! `f ∘ ι_d` for `d | N/M` span the maps `X_0(N) → E` up to translation, and
//! `⟨g, h⟩ = g_* h^*` is a positive definite pairing whose diagonal is the
//! degree. Pulling back to `X_Δ(N)` multiplies it by the cover degree, and
//! composing with an isogeny multiplies it by the isogeny degree.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ellcurve::{Coefficients, EllipticCurveRecord};
use crate::error::{domain, Error, Result};
use crate::numtheory::{divisors, gcd, is_squarefree, lcm, moebius, psi_index};
use crate::units::DeltaSubgroup;

/// A multiplier applied to a [`DegreeForm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Pullback along `X_Δ(N) → X_0(N)`, of the given degree.
    Cover(u64),
    /// Composition with an isogeny of the given degree.
    Isogeny(u64),
}

/// Gram matrix of the degree pairing on `{f ∘ ι_d : d | N/M}`.
///
/// `gram[i][j]` is the pairing itself, so the form is `Σ gram[i][j] x_i x_j`
/// and a cross coefficient is `2·gram[i][j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeForm {
    pub level: u64,
    pub label: String,
    pub conductor: u64,
    pub divisor_basis: Vec<u64>,
    pub gram: Vec<Vec<i64>>,
    pub scale_log: Vec<Scale>,
}

impl DegreeForm {
    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    /// Product of all recorded multipliers.
    pub fn total_scale(&self) -> u64 {
        self.scale_log
            .iter()
            .map(|s| match s {
                Scale::Cover(k) | Scale::Isogeny(k) => *k,
            })
            .product()
    }

    /// `Q(x) = Σ gram[i][j] x_i x_j`.
    pub fn evaluate(&self, x: &[i64]) -> i64 {
        let mut q = 0;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                q += b * x[i] * x[j];
            }
        }
        q
    }

    /// Flip basis signs so that every off-diagonal entry of the first row is
    /// at most zero. Forms differing only in basis orientation then agree.
    pub fn sign_normalized(&self) -> DegreeForm {
        let mut out = self.clone();
        for j in 1..out.dim() {
            if out.gram[0][j] > 0 {
                for k in 0..out.dim() {
                    if k != j {
                        out.gram[j][k] = -out.gram[j][k];
                        out.gram[k][j] = -out.gram[k][j];
                    }
                }
            }
        }
        out
    }

    /// The form as a polynomial, e.g. `6x²-8xy+6y²`; variables beyond three
    /// are written `x1, x2, …`.
    pub fn polynomial_string(&self) -> String {
        use core::fmt::Write;
        let n = self.dim();
        let name = |i: usize| -> String {
            if n <= 3 {
                String::from(["x", "y", "z"][i])
            } else {
                alloc::format!("x{}", i + 1)
            }
        };
        let mut s = String::new();
        for i in 0..n {
            for j in i..n {
                let c = if i == j {
                    self.gram[i][i]
                } else {
                    2 * self.gram[i][j]
                };
                if c == 0 {
                    continue;
                }
                if !s.is_empty() && c > 0 {
                    s.push('+');
                }
                match c {
                    1 => {}
                    -1 => s.push('-'),
                    _ => {
                        let _ = write!(s, "{c}");
                    }
                }
                if i == j {
                    let _ = write!(s, "{}²", name(i));
                } else {
                    let _ = write!(s, "{}{}", name(i), name(j));
                }
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

impl fmt::Display for DegreeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.gram {
            let cells: Vec<String> = row.iter().map(|v| alloc::format!("{v:>4}")).collect();
            writeln!(f, "[{} ]", cells.join(""))?;
        }
        Ok(())
    }
}

fn check_setup(e: &EllipticCurveRecord, n: u64) -> Result<u64> {
    let m = e.conductor;
    if m == 0 || n == 0 || !n.is_multiple_of(m) {
        return Err(domain!("conductor {m} of {} does not divide {n}", e.label));
    }
    let q = n / m;
    if !(is_squarefree(q)? || gcd(q, m) == 1) {
        return Err(Error::NotApplicable(alloc::format!(
            "N/M = {q} is neither squarefree nor coprime to M = {m}"
        )));
    }
    Ok(q)
}

/// `Σ_{m² | k} μ(m) a_{k/m²}`.
fn filtered_coefficient(coeffs: &mut Coefficients<'_>, k: u64) -> Result<i64> {
    let mut sum = 0;
    for m in divisors(k)? {
        if m * m > k {
            break;
        }
        if k.is_multiple_of(m * m) {
            sum += moebius(m)? * coeffs.an(k / (m * m))?;
        }
    }
    Ok(sum)
}

fn entry(
    coeffs: &mut Coefficients<'_>,
    e: &EllipticCurveRecord,
    n: u64,
    d1: u64,
    d2: u64,
) -> Result<i64> {
    let g = gcd(d1, d2);
    let a = filtered_coefficient(coeffs, d1 / g)? * filtered_coefficient(coeffs, d2 / g)?;
    let num = psi_index(n)?;
    let den = psi_index(e.conductor * lcm(d1, d2) / g)?;
    if num % den != 0 {
        return Err(Error::InvariantViolation(alloc::format!(
            "ψ({n}) is not divisible by {den}"
        )));
    }
    let deg = i64::try_from(e.modular_degree).map_err(|_| domain!("modular degree too large"))?;
    Ok(a * (num / den) as i64 * deg)
}

/// `⟨f ∘ ι_{d1}, f ∘ ι_{d2}⟩` on `X_0(N)`.
pub fn pairing_entry(e: &EllipticCurveRecord, n: u64, d1: u64, d2: u64) -> Result<i64> {
    let q = check_setup(e, n)?;
    if d1 == 0 || d2 == 0 || q % d1 != 0 || q % d2 != 0 {
        return Err(domain!("{d1} and {d2} must divide N/M = {q}"));
    }
    entry(&mut Coefficients::new(e), e, n, d1, d2)
}

/// The full Gram matrix over the divisors of `N/M`.
pub fn gram_matrix(e: &EllipticCurveRecord, n: u64) -> Result<DegreeForm> {
    let q = check_setup(e, n)?;
    let basis = divisors(q)?;
    let mut coeffs = Coefficients::new(e);
    let k = basis.len();
    let mut gram = vec![vec![0i64; k]; k];
    for i in 0..k {
        for j in i..k {
            let v = entry(&mut coeffs, e, n, basis[i], basis[j])?;
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    Ok(DegreeForm {
        level: n,
        label: e.label.clone(),
        conductor: e.conductor,
        divisor_basis: basis,
        gram,
        scale_log: Vec::new(),
    })
}

fn scaled(form: &DegreeForm, k: u64, tag: Scale) -> Result<DegreeForm> {
    if k == 0 {
        return Err(domain!("scale factor must be positive"));
    }
    let k = i64::try_from(k).map_err(|_| domain!("scale factor too large"))?;
    let mut out = form.clone();
    for row in &mut out.gram {
        for v in row.iter_mut() {
            *v = v
                .checked_mul(k)
                .ok_or_else(|| domain!("scaled Gram entry overflows"))?;
        }
    }
    out.scale_log.push(tag);
    Ok(out)
}

/// Multiply by the degree of `X_Δ(N) → X_0(N)`.
pub fn scale_for_cover(form: &DegreeForm, delta_index: u64) -> Result<DegreeForm> {
    scaled(form, delta_index, Scale::Cover(delta_index))
}

/// Multiply by the degree of an isogeny `E → E'`.
pub fn scale_for_isogeny(form: &DegreeForm, psi_degree: u64) -> Result<DegreeForm> {
    scaled(form, psi_degree, Scale::Isogeny(psi_degree))
}

/// `Σ(N) ∩ E` for an optimal curve of conductor `N`, when nontrivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShimuraRecord {
    pub conductor: u64,
    /// The curve, when it can be pinned down from the level alone.
    pub label: Option<String>,
    pub group_order: u64,
    pub group_structure: String,
}

/// Levels up to which every nontrivial `Σ(N) ∩ E` of an even-rank optimal
/// curve is tabulated, and below which odd-rank curves have trivial kernel.
pub const SHIMURA_SEARCH_BOUND: u64 = 800;

/// Minimal degree of a parametrization `X_Δ(N) → E'` with `E'` in the isogeny
/// class of `E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrongWeilDegree {
    Exact(u64),
    /// The degree is one of these values, listed increasingly.
    OneOf(Vec<u64>),
}

impl StrongWeilDegree {
    pub fn candidates(&self) -> Vec<u64> {
        match self {
            Self::Exact(d) => vec![*d],
            Self::OneOf(v) => v.clone(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact(_))
    }

    /// Could a map of degree `target` to a curve isogenous to `E` exist?
    /// Such a map factors through the minimal one, so its degree divides.
    pub fn may_divide(&self, target: u64) -> bool {
        self.candidates().iter().any(|&d| target.is_multiple_of(d))
    }
}

/// The minimal parametrization degree `d·#((ℤ/Nℤ)^×/Δ)/#(E ∩ Σ(Δ))`.
///
/// `E` must be the optimal curve of its class. For odd analytic rank the
/// kernel lies in `E[2]`, and is trivial when `N ≤ 800`, in which case the
/// degree is `d·index`; above that bound the numerator of `d·index/4` is
/// returned. For even analytic rank `shimura` is `Σ(N) ∩ E`, `None` meaning
/// trivial when `N ≤ 800` (the table there is complete) and unknown of order
/// at most 16 beyond. Since `Σ(Δ) ∩ E` is only known to be a subgroup of
/// `Σ(N) ∩ E`, a nontrivial record gives a candidate set unless `Δ = {±1}`.
pub fn strong_weil_degree_delta(
    e: &EllipticCurveRecord,
    delta: &DeltaSubgroup,
    shimura: Option<&ShimuraRecord>,
) -> Result<StrongWeilDegree> {
    let n = delta.modulus();
    if e.conductor != n {
        return Err(domain!(
            "{} has conductor {}, not {n}",
            e.label,
            e.conductor
        ));
    }
    if let Some(s) = shimura {
        if s.conductor != n || s.group_order == 0 {
            return Err(domain!(
                "Shimura record for level {} does not apply to {}",
                s.conductor,
                e.label
            ));
        }
    }
    let index = delta.index_in_units();
    let full = e
        .modular_degree
        .checked_mul(index)
        .ok_or_else(|| domain!("degree overflows"))?;
    if index == 1 {
        return Ok(StrongWeilDegree::Exact(e.modular_degree));
    }
    if e.analytic_rank % 2 == 1 {
        if n <= SHIMURA_SEARCH_BOUND {
            return Ok(StrongWeilDegree::Exact(full));
        }
        return Ok(StrongWeilDegree::Exact(full / gcd(full, 4)));
    }
    let kernel_bound = match shimura {
        Some(s) => s.group_order,
        None if n <= SHIMURA_SEARCH_BOUND => 1,
        None => 16,
    };
    let pm_one = delta.len() as u64 == if n > 2 { 2 } else { 1 };
    let ks: Vec<u64> = if shimura.is_some() && pm_one {
        vec![kernel_bound]
    } else if shimura.is_some() {
        divisors(kernel_bound)?
    } else {
        (1..=kernel_bound).collect()
    };
    let mut out: Vec<u64> = ks
        .into_iter()
        .filter(|k| full % k == 0)
        .map(|k| full / k)
        .collect();
    out.sort_unstable();
    out.dedup();
    match out.as_slice() {
        [] => Err(Error::InvariantViolation(alloc::format!(
            "no admissible degree for {}",
            e.label
        ))),
        [d] => Ok(StrongWeilDegree::Exact(*d)),
        _ => Ok(StrongWeilDegree::OneOf(out)),
    }
}

/// Is `(N, E)` one of the pairs whose map `E^{σ_0(N/M)} → J_Δ(N)` is known to
/// be injective, so that the Gram form describes all maps?
pub fn hypothesis_flag_cond_m(n: u64, e: &EllipticCurveRecord, verified: &[(u64, String)]) -> bool {
    e.conductor < n
        && n.is_multiple_of(e.conductor)
        && verified.iter().any(|(m, l)| *m == n && *l == e.label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellcurve::curve;
    use crate::units::{parse_delta_spec, subgroup_from_generators};

    fn e37a1() -> EllipticCurveRecord {
        curve("37a1", [0, 0, 1, -1, 0], 37, 1, 2)
    }
    fn e43a1() -> EllipticCurveRecord {
        curve("43a1", [0, 1, 1, 0, 0], 43, 1, 2)
    }
    fn e53a1() -> EllipticCurveRecord {
        curve("53a1", [1, -1, 1, 0, 0], 53, 1, 2)
    }

    #[test]
    fn pairing_entries() {
        assert_eq!(pairing_entry(&e37a1(), 74, 1, 1).unwrap(), 6);
        assert_eq!(pairing_entry(&e37a1(), 74, 1, 2).unwrap(), -4);
        assert_eq!(pairing_entry(&e53a1(), 159, 1, 3).unwrap(), -6);
        assert!(pairing_entry(&e37a1(), 74, 1, 3).is_err());
        assert!(pairing_entry(&e37a1(), 75, 1, 1).is_err());
    }

    #[test]
    fn gram_matrices() {
        assert_eq!(gram_matrix(&e43a1(), 86).unwrap().gram, [[6, -4], [-4, 6]]);
        assert_eq!(gram_matrix(&e37a1(), 111).unwrap().gram, [[8, -6], [-6, 8]]);
        let f = gram_matrix(&e37a1(), 37).unwrap();
        assert_eq!(f.gram, [[2]]);
        assert_eq!(
            gram_matrix(&e37a1(), 74).unwrap().polynomial_string(),
            "6x²-8xy+6y²"
        );
    }

    #[test]
    fn hypothesis_is_enforced() {
        // N/M = 4 is not squarefree but is coprime to 37
        assert!(gram_matrix(&e37a1(), 148).is_ok());
        let e = curve("11a1", [0, -1, 1, -10, -20], 11, 0, 1);
        assert!(matches!(
            gram_matrix(&e, 11 * 11 * 11),
            Err(Error::NotApplicable(_))
        ));
        assert_eq!(gram_matrix(&e, 11 * 11 * 2).unwrap().dim(), 4);
    }

    #[test]
    fn scaling() {
        let f = gram_matrix(&e37a1(), 74).unwrap();
        assert_eq!(scale_for_cover(&f, 2).unwrap().gram, [[12, -8], [-8, 12]]);
        assert_eq!(scale_for_cover(&f, 1).unwrap().gram, f.gram);
        let g = gram_matrix(&e37a1(), 111).unwrap();
        assert_eq!(scale_for_cover(&g, 3).unwrap().gram, [[24, -18], [-18, 24]]);
        let one = gram_matrix(&e37a1(), 37).unwrap();
        let s = scale_for_isogeny(&one, 5).unwrap();
        assert_eq!(s.gram, [[10]]);
        assert_eq!(s.scale_log, [Scale::Isogeny(5)]);
        assert!(scale_for_cover(&f, 0).is_err());
    }

    #[test]
    fn sign_normalization() {
        let mut f = gram_matrix(&e37a1(), 74).unwrap();
        f.gram = vec![vec![6, 4], vec![4, 6]];
        assert_eq!(f.sign_normalized().gram, [[6, -4], [-4, 6]]);
    }

    #[test]
    fn strong_weil() {
        let e = e37a1();
        let d4 = subgroup_from_generators(37, &[4], false).unwrap();
        assert_eq!(
            strong_weil_degree_delta(&e, &d4, None).unwrap(),
            StrongWeilDegree::Exact(4)
        );
        let full = DeltaSubgroup::full(37).unwrap();
        assert_eq!(
            strong_weil_degree_delta(&e, &full, None).unwrap(),
            StrongWeilDegree::Exact(2)
        );
        let small = parse_delta_spec(37, "6,8,10,11,14", true).unwrap();
        assert_eq!(
            strong_weil_degree_delta(&e, &small, None).unwrap(),
            StrongWeilDegree::Exact(6)
        );
        assert!(
            strong_weil_degree_delta(&e, &parse_delta_spec(74, "", true).unwrap(), None).is_err()
        );
    }

    #[test]
    fn strong_weil_even_rank() {
        let e = curve("11a1", [0, -1, 1, -10, -20], 11, 0, 1);
        let rec = ShimuraRecord {
            conductor: 11,
            label: Some("11a1".into()),
            group_order: 5,
            group_structure: "C5".into(),
        };
        let pm = DeltaSubgroup::plus_minus_one(11).unwrap();
        // X_1(11) → X_0(11) has degree 5 and X_1(11) is itself an elliptic curve
        assert_eq!(
            strong_weil_degree_delta(&e, &pm, Some(&rec)).unwrap(),
            StrongWeilDegree::Exact(1)
        );
        assert_eq!(
            strong_weil_degree_delta(&e, &pm, None).unwrap(),
            StrongWeilDegree::Exact(5)
        );
    }

    #[test]
    fn verified_pairs() {
        let table = vec![(74, String::from("37a1")), (159, String::from("53a1"))];
        assert!(hypothesis_flag_cond_m(74, &e37a1(), &table));
        assert!(hypothesis_flag_cond_m(159, &e53a1(), &table));
        assert!(!hypothesis_flag_cond_m(111, &e37a1(), &table));
        assert!(!hypothesis_flag_cond_m(37, &e37a1(), &table));
    }
}
