//! The unit group `(ℤ/Nℤ)^×`, its invariant-factor structure and the subgroups
//! `Δ ∋ −1` that index the curves `X_Δ(N)`.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{domain, Error, Result};
use crate::numtheory::{euler_phi, gcd, mod_mul, mod_pow, residue};

/// Invariant-factor decomposition `C_{d_1} × … × C_{d_k}` with `d_1 | d_2 | …`
/// and one generator per factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroupStructure {
    pub modulus: u64,
    pub invariant_factors: Vec<u64>,
    pub generators: Vec<u64>,
}

impl fmt::Display for UnitGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.invariant_factors.iter().enumerate() {
            if i > 0 {
                f.write_str("×")?;
            }
            write!(f, "C{d}")?;
        }
        Ok(())
    }
}

/// A subgroup of `(ℤ/Nℤ)^×`, identified by its sorted list of residues.
///
/// Constructors only hand out subgroups that contain `−1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeltaSubgroup {
    modulus: u64,
    elements: Vec<u64>,
}

impl DeltaSubgroup {
    /// The whole unit group, so that `X_Δ(N) = X_0(N)`.
    pub fn full(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(domain!("modulus must be positive"));
        }
        let elements = (0..modulus).filter(|&r| gcd(r, modulus) == 1).collect();
        Ok(Self { modulus, elements })
    }

    /// `{±1}`, so that `X_Δ(N) ≅ X_1(N)`.
    pub fn plus_minus_one(modulus: u64) -> Result<Self> {
        subgroup_from_generators(modulus, &[], true)
    }

    /// Validate an explicit residue list as a subgroup containing `−1`.
    pub fn from_elements(modulus: u64, elements: &[u64]) -> Result<Self> {
        let set: BTreeSet<u64> = elements.iter().map(|&r| r % modulus.max(1)).collect();
        let gens: Vec<u64> = set.iter().copied().collect();
        let closure = subgroup_from_generators(modulus, &gens, false)?;
        if closure.elements.len() != set.len() {
            return Err(domain!(
                "residues {elements:?} are not closed under multiplication mod {modulus}"
            ));
        }
        if !closure.contains_minus_one() {
            return Err(domain!("subgroup does not contain -1 mod {modulus}"));
        }
        Ok(closure)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, r: u64) -> bool {
        self.elements.binary_search(&(r % self.modulus)).is_ok()
    }

    fn contains_minus_one(&self) -> bool {
        self.contains(self.modulus - 1)
    }

    pub fn is_subgroup_of(&self, other: &DeltaSubgroup) -> bool {
        self.modulus == other.modulus && self.elements.iter().all(|&r| other.contains(r))
    }

    /// `#((ℤ/Nℤ)^× / Δ)`, the degree of `X_Δ(N) → X_0(N)`.
    pub fn index_in_units(&self) -> u64 {
        let phi = euler_phi(self.modulus).expect("modulus is positive");
        phi / self.elements.len() as u64
    }

    /// `{±1} ⊊ Δ ⊊ (ℤ/Nℤ)^×`.
    pub fn is_intermediate(&self) -> bool {
        let pm = if self.modulus <= 2 { 1 } else { 2 };
        self.elements.len() > pm && self.index_in_units() > 1
    }

    /// Residues listed up to sign, e.g. `{±1,±4,±5}`.
    pub fn plus_minus_string(&self) -> String {
        use core::fmt::Write;
        let n = self.modulus;
        let mut s = String::from("{");
        let mut first = true;
        for &r in &self.elements {
            if n > 2 && r > n / 2 {
                continue;
            }
            if !first {
                s.push(',');
            }
            first = false;
            if n > 2 {
                s.push('±');
            }
            let _ = write!(s, "{r}");
        }
        s.push('}');
        s
    }

    /// A comma-separated residue list accepted back by [`parse_delta_spec`].
    pub fn spec_string(&self) -> String {
        let n = self.modulus;
        let reps: Vec<String> = self
            .elements
            .iter()
            .filter(|&&r| n <= 2 || r <= n / 2)
            .map(|r| alloc::format!("{r}"))
            .collect();
        reps.join(",")
    }
}

impl fmt::Display for DeltaSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.plus_minus_string())
    }
}

fn check_modulus(n: u64) -> Result<()> {
    if n < 3 {
        return Err(domain!("modulus must be at least 3, got {n}"));
    }
    Ok(())
}

fn units(n: u64) -> Vec<u64> {
    (1..n).filter(|&r| gcd(r, n) == 1).collect()
}

/// Multiplicative order of a unit `x` modulo `n`.
pub fn order_mod(x: u64, n: u64) -> u64 {
    let mut k = 1;
    let mut y = x % n;
    while y != 1 % n {
        y = mod_mul(y, x, n);
        k += 1;
    }
    k
}

/// Invariant factors and generators of `(ℤ/Nℤ)^×`.
///
/// Generators are chosen greedily: at each step take the largest order `m`
/// attained in the quotient by the subgroup generated so far, and the smallest
/// residue whose order is exactly `m` and whose powers meet that subgroup only
/// in `1`. The factors come out in decreasing order and are reported increasing.
pub fn unit_group(n: u64) -> Result<UnitGroupStructure> {
    check_modulus(n)?;
    let phi = euler_phi(n)?;
    let all = units(n);
    let mut in_h = vec![false; n as usize];
    in_h[1] = true;
    let mut h_size = 1u64;
    let mut factors = Vec::new();
    let mut gens = Vec::new();
    while h_size < phi {
        let quotient_order = |x: u64| {
            let mut k = 1;
            let mut y = x;
            while !in_h[y as usize] {
                y = mod_mul(y, x, n);
                k += 1;
            }
            k
        };
        let m = all.iter().map(|&x| quotient_order(x)).max().unwrap_or(1);
        let g = all
            .iter()
            .copied()
            .find(|&x| quotient_order(x) == m && order_mod(x, n) == m)
            .ok_or_else(|| {
                Error::InvariantViolation(alloc::format!("no lift of order {m} mod {n}"))
            })?;
        let h: Vec<u64> = (1..n).filter(|&r| in_h[r as usize]).collect();
        let mut p = 1;
        for _ in 1..m {
            p = mod_mul(p, g, n);
            for &x in &h {
                in_h[mod_mul(x, p, n) as usize] = true;
            }
        }
        h_size *= m;
        factors.push(m);
        gens.push(g);
    }
    factors.reverse();
    gens.reverse();
    if factors.windows(2).any(|w| w[1] % w[0] != 0) {
        return Err(Error::InvariantViolation(alloc::format!(
            "factors {factors:?} do not form a divisor chain"
        )));
    }
    Ok(UnitGroupStructure {
        modulus: n,
        invariant_factors: factors,
        generators: gens,
    })
}

/// Smallest subgroup containing `gens` (and `−1` when `adjoin_minus_one`).
pub fn subgroup_from_generators(
    n: u64,
    gens: &[u64],
    adjoin_minus_one: bool,
) -> Result<DeltaSubgroup> {
    if n == 0 {
        return Err(domain!("modulus must be positive"));
    }
    let mut gs: Vec<u64> = Vec::with_capacity(gens.len() + 1);
    for &g in gens {
        let g = g % n;
        if gcd(g, n) != 1 {
            return Err(domain!("generator {g} is not coprime to {n}"));
        }
        gs.push(g);
    }
    if adjoin_minus_one {
        gs.push(n - 1);
    }
    let one = 1 % n;
    let mut seen = vec![false; n as usize];
    seen[one as usize] = true;
    let mut queue = VecDeque::from([one]);
    let mut elements = vec![one];
    while let Some(x) = queue.pop_front() {
        for &g in &gs {
            let y = mod_mul(x, g, n);
            if !seen[y as usize] {
                seen[y as usize] = true;
                elements.push(y);
                queue.push_back(y);
            }
        }
    }
    elements.sort_unstable();
    Ok(DeltaSubgroup {
        modulus: n,
        elements,
    })
}

/// Every subgroup `Δ ⊇ {±1}` of `(ℤ/Nℤ)^×`, sorted by `(size, elements)`.
///
/// Found by closing `⟨−1⟩` under adjoining one more residue at a time; any
/// subgroup is reached by adjoining its own elements.
pub fn subgroups_containing_minus_one(n: u64) -> Result<Vec<DeltaSubgroup>> {
    check_modulus(n)?;
    let all = units(n);
    let start = DeltaSubgroup::plus_minus_one(n)?;
    let mut found = BTreeSet::new();
    found.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(h) = queue.pop_front() {
        let mut covered = vec![false; n as usize];
        for &x in &h.elements {
            covered[x as usize] = true;
        }
        for &x in &all {
            if covered[x as usize] {
                continue;
            }
            let mut gens = h.elements.clone();
            gens.push(x);
            let bigger = subgroup_from_generators(n, &gens, false)?;
            for &y in &bigger.elements {
                // adjoining any element of the coset xH gives the same group
                if h.contains(mod_mul(y, mod_inv_unit(x, n), n)) {
                    covered[y as usize] = true;
                }
            }
            if found.insert(bigger.clone()) {
                queue.push_back(bigger);
            }
        }
    }
    let mut out: Vec<DeltaSubgroup> = found.into_iter().collect();
    out.sort_by(|a, b| (a.len(), &a.elements).cmp(&(b.len(), &b.elements)));
    Ok(out)
}

fn mod_inv_unit(x: u64, n: u64) -> u64 {
    crate::numtheory::mod_inv(x, n).expect("unit")
}

/// `#((ℤ/Nℤ)^× / Δ)`.
pub fn index_in_units(delta: &DeltaSubgroup) -> u64 {
    delta.index_in_units()
}

/// Parse the textual Δ syntax: comma-separated residues, each optionally of
/// the form `g^k` and optionally prefixed by `-` or `±`.
pub fn parse_delta_spec(n: u64, spec: &str, adjoin_minus_one: bool) -> Result<DeltaSubgroup> {
    if n == 0 {
        return Err(domain!("modulus must be positive"));
    }
    let mut gens = Vec::new();
    let trimmed = spec
        .trim()
        .trim_start_matches(['{', '<', '⟨'])
        .trim_end_matches(['}', '>', '⟩']);
    for token in trimmed.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let (both_signs, body) = match token.strip_prefix('±') {
            Some(rest) => (true, rest.trim()),
            None => (false, token),
        };
        let (base, exp) = match body.split_once('^') {
            Some((b, e)) => (b.trim(), e.trim()),
            None => (body, "1"),
        };
        let base: i64 = base
            .parse()
            .map_err(|_| domain!("bad residue {base:?} in {spec:?}"))?;
        let exp: u64 = exp
            .parse()
            .map_err(|_| domain!("bad exponent {exp:?} in {spec:?}"))?;
        let g = mod_pow(residue(base, n), exp, n);
        gens.push(g);
        if both_signs {
            gens.push(residue(-(g as i64), n));
        }
    }
    subgroup_from_generators(n, &gens, adjoin_minus_one)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_group_examples() {
        assert_eq!(unit_group(40).unwrap().invariant_factors, [2, 2, 4]);
        assert_eq!(unit_group(29).unwrap().invariant_factors, [28]);
        assert_eq!(unit_group(37).unwrap().invariant_factors, [36]);
        assert!(unit_group(2).is_err());
    }

    #[test]
    fn unit_group_generators_have_factor_orders() {
        for n in 3..200 {
            let g = unit_group(n).unwrap();
            assert_eq!(
                g.invariant_factors.iter().product::<u64>(),
                euler_phi(n).unwrap()
            );
            for (&d, &x) in g.invariant_factors.iter().zip(&g.generators) {
                assert_eq!(order_mod(x, n), d, "n = {n}");
            }
            let all = subgroup_from_generators(n, &g.generators, false).unwrap();
            assert_eq!(all.len() as u64, euler_phi(n).unwrap());
        }
    }

    #[test]
    fn generated_subgroups() {
        let d = subgroup_from_generators(53, &[4], false).unwrap();
        assert_eq!(d.len(), 26);
        let d = subgroup_from_generators(55, &[54, 4], false).unwrap();
        assert_eq!(d.len(), 20);
        let d = parse_delta_spec(65, "2,12^2", false).unwrap();
        assert_eq!(d.len(), 24);
        assert!(subgroup_from_generators(12, &[2], true).is_err());
    }

    #[test]
    fn subgroup_counts() {
        let s37 = subgroups_containing_minus_one(37).unwrap();
        let sizes: Vec<usize> = s37.iter().map(|d| d.len()).collect();
        assert_eq!(sizes, [2, 4, 6, 12, 18, 36]);
        assert_eq!(subgroups_containing_minus_one(13).unwrap().len(), 4);
        assert_eq!(subgroups_containing_minus_one(23).unwrap().len(), 2);
    }

    #[test]
    fn index_examples() {
        let d = subgroups_containing_minus_one(29)
            .unwrap()
            .into_iter()
            .find(|d| d.len() == 14)
            .unwrap();
        assert_eq!(index_in_units(&d), 2);
        let d = subgroup_from_generators(37, &[4], false).unwrap();
        assert_eq!(d.len(), 18);
        assert_eq!(index_in_units(&d), 2);
        assert_eq!(index_in_units(&DeltaSubgroup::full(91).unwrap()), 1);
    }

    #[test]
    fn spec_parsing() {
        let a = parse_delta_spec(37, "±6,±8,±10,±11,±14", true).unwrap();
        let b = parse_delta_spec(37, "6,8,10,11,14", true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 12);
        assert_eq!(a.plus_minus_string(), "{±1,±6,±8,±10,±11,±14}");
        assert_eq!(parse_delta_spec(37, &a.spec_string(), true).unwrap(), a);
        assert_eq!(parse_delta_spec(21, "{±1,±8}", true).unwrap().len(), 4);
        assert!(parse_delta_spec(21, "x", true).is_err());
        assert!(DeltaSubgroup::from_elements(13, &[1, 12, 5]).is_err());
        assert_eq!(
            DeltaSubgroup::from_elements(13, &[1, 12, 5, 8])
                .unwrap()
                .len(),
            4
        );
    }
}
