//! Coset combinatorics of `Γ_Δ(N)` in `PSL_2(ℤ)`.
//!
//! A right coset `H g` of `H = {[[a, b], [0, a⁻¹]] : a ∈ Δ}` in `SL_2(ℤ/Nℤ)` is
//! determined by the bottom row `(c, d)` of `g` up to multiplication by `Δ`,
//! so cosets are enumerated as primitive pairs mod `N` modulo `Δ`. Since
//! `−1 ∈ Δ` the count is already the `PSL_2` index.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::numtheory::{gcd, mod_inv, mod_mul};
use crate::units::DeltaSubgroup;

/// A matrix in `SL_2(ℤ/Nℤ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2ModN {
    pub n: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Mat2ModN {
    /// Reduce integer entries mod `n`; fails unless the determinant is `1`.
    pub fn new(n: u64, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if n == 0 {
            return Err(domain!("modulus must be positive"));
        }
        let r = |x: i64| crate::numtheory::residue(x, n);
        let m = Self {
            n,
            a: r(a),
            b: r(b),
            c: r(c),
            d: r(d),
        };
        if m.det() != 1 % n {
            return Err(domain!("determinant of {m:?} is not 1 mod {n}"));
        }
        Ok(m)
    }

    pub fn identity(n: u64) -> Self {
        Self {
            n,
            a: 1 % n,
            b: 0,
            c: 0,
            d: 1 % n,
        }
    }

    pub fn det(&self) -> u64 {
        let n = self.n;
        (mod_mul(self.a, self.d, n) + n - mod_mul(self.b, self.c, n)) % n
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let f = |x: u64, y: u64, z: u64, w: u64| (mod_mul(x, y, n) + mod_mul(z, w, n)) % n;
        Self {
            n,
            a: f(self.a, o.a, self.b, o.c),
            b: f(self.a, o.b, self.b, o.d),
            c: f(self.c, o.a, self.d, o.c),
            d: f(self.c, o.b, self.d, o.d),
        }
    }
}

/// Is `g` in the image of `Γ_Δ(N)`: lower-left entry `0` and upper-left in `Δ`.
pub fn membership(g: &Mat2ModN, delta: &DeltaSubgroup) -> bool {
    g.n == delta.modulus() && g.c == 0 && delta.contains(g.a)
}

/// Right cosets of `Γ_Δ(N)` in `PSL_2(ℤ)` with the permutations induced by
/// `T = [[1,1],[0,1]]`, `S = [[0,−1],[1,0]]` and `ST`.
#[derive(Debug, Clone)]
pub struct CosetSpace {
    pub n: u64,
    pub delta: DeltaSubgroup,
    pub representatives: Vec<Mat2ModN>,
    pub perm_t: Vec<u32>,
    pub perm_s: Vec<u32>,
    pub perm_st: Vec<u32>,
}

impl CosetSpace {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    /// Lengths of the `T`-orbits, i.e. the cusp widths, in order of first coset.
    pub fn cusp_widths(&self) -> Vec<u64> {
        cycle_lengths(&self.perm_t)
    }
}

fn cycle_lengths(perm: &[u32]) -> Vec<u64> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i] as usize;
            len += 1;
        }
        out.push(len);
    }
    out
}

fn fixed_points(perm: &[u32]) -> u64 {
    perm.iter()
        .enumerate()
        .filter(|&(i, &j)| i == j as usize)
        .count() as u64
}

/// Build the coset space of `Γ_Δ(N)`. Representatives are listed by their
/// lexicographically smallest bottom row within the `Δ`-orbit.
pub fn coset_space(n: u64, delta: &DeltaSubgroup) -> Result<CosetSpace> {
    if n == 0 || delta.modulus() != n {
        return Err(domain!(
            "Δ is a subgroup mod {}, not mod {n}",
            delta.modulus()
        ));
    }
    if !delta.contains(n - 1) {
        return Err(domain!("Δ must contain -1 mod {n}"));
    }
    let nn = n as usize;
    let mut class = vec![u32::MAX; nn * nn];
    let mut rows: Vec<(u64, u64)> = Vec::new();
    for c in 0..n {
        for d in 0..n {
            if class[(c * n + d) as usize] != u32::MAX || gcd(gcd(c, d), n) != 1 {
                continue;
            }
            let id = rows.len() as u32;
            for &u in delta.elements() {
                class[(mod_mul(u, c, n) * n + mod_mul(u, d, n)) as usize] = id;
            }
            rows.push((c, d));
        }
    }
    let idx = |c: u64, d: u64| class[((c % n) * n + d % n) as usize];
    let mut perm_t = Vec::with_capacity(rows.len());
    let mut perm_s = Vec::with_capacity(rows.len());
    let mut perm_st = Vec::with_capacity(rows.len());
    let mut representatives = Vec::with_capacity(rows.len());
    for &(c, d) in &rows {
        perm_t.push(idx(c, c + d));
        perm_s.push(idx(d, n - c));
        perm_st.push(idx(d, d + n - c));
        representatives.push(lift_row(n, c, d)?);
    }
    if [&perm_t, &perm_s, &perm_st]
        .iter()
        .any(|p| p.contains(&u32::MAX))
    {
        return Err(Error::InvariantViolation(alloc::format!(
            "coset action not closed at N = {n}"
        )));
    }
    Ok(CosetSpace {
        n,
        delta: delta.clone(),
        representatives,
        perm_t,
        perm_s,
        perm_st,
    })
}

/// Complete a primitive bottom row to a matrix of determinant 1: pick the
/// first `t` with `d + t·c` a unit `u`, then `a = u⁻¹`, `b = −t·a`.
fn lift_row(n: u64, c: u64, d: u64) -> Result<Mat2ModN> {
    if n == 1 {
        return Ok(Mat2ModN::identity(1));
    }
    for t in 0..n {
        let u = (d + mod_mul(t, c, n)) % n;
        if let Some(a) = mod_inv(u, n) {
            let b = (n - mod_mul(t, a, n)) % n;
            return Ok(Mat2ModN { n, a, b, c, d });
        }
    }
    Err(Error::InvariantViolation(alloc::format!(
        "row ({c}, {d}) is not primitive mod {n}"
    )))
}

/// Index, elliptic points, cusps and genus of `X_Δ(N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveSignature {
    pub n: u64,
    pub delta: DeltaSubgroup,
    pub mu: u64,
    pub nu2: u64,
    pub nu3: u64,
    pub nu_inf: u64,
    pub genus: u64,
}

impl CurveSignature {
    pub fn from_coset_space(space: &CosetSpace) -> Result<Self> {
        let mu = space.len() as u64;
        let nu2 = fixed_points(&space.perm_s);
        let nu3 = fixed_points(&space.perm_st);
        let nu_inf = cycle_lengths(&space.perm_t).len() as u64;
        let twelve_g = 12 + mu as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * nu_inf as i64;
        if twelve_g < 0 || twelve_g % 12 != 0 {
            return Err(Error::InvariantViolation(alloc::format!(
                "genus formula gives 12g = {twelve_g} at N = {}",
                space.n
            )));
        }
        Ok(Self {
            n: space.n,
            delta: space.delta.clone(),
            mu,
            nu2,
            nu3,
            nu_inf,
            genus: twelve_g as u64 / 12,
        })
    }
}

pub fn signature(n: u64, delta: &DeltaSubgroup) -> Result<CurveSignature> {
    if n < 3 {
        return Err(domain!("level must be at least 3, got {n}"));
    }
    CurveSignature::from_coset_space(&coset_space(n, delta)?)
}

/// Signature of `X_0(N)`.
pub fn signature_gamma0(n: u64) -> Result<CurveSignature> {
    let full = DeltaSubgroup::full(n)?;
    CurveSignature::from_coset_space(&coset_space(n, &full)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{divisors, euler_phi, factorize, psi_index};
    use crate::units::{
        parse_delta_spec, subgroup_from_generators, subgroups_containing_minus_one,
    };

    fn delta_of_size(n: u64, size: usize) -> DeltaSubgroup {
        let all: Vec<_> = subgroups_containing_minus_one(n)
            .unwrap()
            .into_iter()
            .filter(|d| d.len() == size)
            .collect();
        assert_eq!(all.len(), 1, "Δ of size {size} mod {n} is not unique");
        all.into_iter().next().unwrap()
    }

    #[test]
    fn lmfdb_indices() {
        // the only Δ of size 4 mod 28; ⟨−1, 11⟩ is the whole unit group
        let d = parse_delta_spec(28, "13", true).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(coset_space(28, &d).unwrap().len(), 144);
        let d = parse_delta_spec(26, "5", true).unwrap();
        assert_eq!(coset_space(26, &d).unwrap().len(), 126);
        assert_eq!(coset_space(37, &delta_of_size(37, 12)).unwrap().len(), 114);
    }

    #[test]
    fn membership_examples() {
        let d = DeltaSubgroup::plus_minus_one(29).unwrap();
        assert!(membership(&Mat2ModN::identity(29), &d));
        assert!(membership(&Mat2ModN::new(29, 1, 1, 0, 1).unwrap(), &d));
        assert!(!membership(&Mat2ModN::new(29, 0, -1, 1, 0).unwrap(), &d));
        assert!(Mat2ModN::new(29, 1, 1, 1, 1).is_err());
    }

    #[test]
    fn representatives_are_unimodular_and_distinct() {
        let d = parse_delta_spec(21, "8", true).unwrap();
        let space = coset_space(21, &d).unwrap();
        for g in &space.representatives {
            assert_eq!(g.det(), 1);
        }
        for (i, g) in space.representatives.iter().enumerate() {
            for h in &space.representatives[..i] {
                let hinv = Mat2ModN {
                    n: 21,
                    a: h.d,
                    b: (21 - h.b) % 21,
                    c: (21 - h.c) % 21,
                    d: h.a,
                };
                assert!(!membership(&g.mul(&hinv), &d));
            }
        }
    }

    #[test]
    fn table_genera() {
        assert_eq!(
            signature(101, &subgroup_from_generators(101, &[4], false).unwrap())
                .unwrap()
                .genus,
            16
        );
        assert_eq!(signature(49, &delta_of_size(49, 14)).unwrap().genus, 3);
        assert_eq!(signature(37, &delta_of_size(37, 12)).unwrap().genus, 4);
    }

    #[test]
    fn gamma0_examples() {
        let s = signature_gamma0(37).unwrap();
        assert_eq!((s.mu, s.nu2, s.nu3, s.nu_inf, s.genus), (38, 2, 2, 2, 2));
        let s = signature_gamma0(26).unwrap();
        assert_eq!((s.nu_inf, s.genus), (4, 2));
        assert_eq!(signature_gamma0(1).unwrap().genus, 0);
        assert_eq!(signature_gamma0(2).unwrap().mu, 3);
    }

    fn legendre_like(n: u64, poly: impl Fn(u64) -> u64) -> u64 {
        (0..n).filter(|&x| poly(x).is_multiple_of(n)).count() as u64
    }

    #[test]
    fn gamma0_matches_classical_counts() {
        for n in 1..=200u64 {
            let s = signature_gamma0(n).unwrap();
            assert_eq!(s.mu, psi_index(n).unwrap());
            assert_eq!(s.nu2, legendre_like(n, |x| x * x + 1), "nu2 at {n}");
            assert_eq!(s.nu3, legendre_like(n, |x| x * x + x + 1), "nu3 at {n}");
            let cusps: u64 = divisors(n)
                .unwrap()
                .into_iter()
                .map(|d| euler_phi(gcd(d, n / d)).unwrap())
                .sum();
            assert_eq!(s.nu_inf, cusps, "cusps at {n}");
        }
    }

    #[test]
    fn gamma1_is_torsion_free() {
        for n in 4..=60u64 {
            let s = signature(n, &DeltaSubgroup::plus_minus_one(n).unwrap()).unwrap();
            assert_eq!((s.nu2, s.nu3), (0, 0));
            let f = factorize(n).unwrap();
            let expect: u64 = f
                .factors()
                .iter()
                .map(|&(p, e)| (p * p - 1) * p.pow(2 * e - 2))
                .product::<u64>()
                / 2;
            assert_eq!(s.mu, expect);
        }
    }

    #[test]
    fn permutation_orders() {
        let space = coset_space(45, &parse_delta_spec(45, "4", true).unwrap()).unwrap();
        for i in 0..space.len() {
            let s = space.perm_s[i] as usize;
            assert_eq!(space.perm_s[s] as usize, i);
            let a = space.perm_st[i] as usize;
            let b = space.perm_st[a] as usize;
            assert_eq!(space.perm_st[b] as usize, i);
        }
        assert_eq!(space.cusp_widths().iter().sum::<u64>(), space.len() as u64);
    }

    #[test]
    fn rejects_delta_without_minus_one() {
        let d = subgroup_from_generators(13, &[3], false).unwrap();
        assert!(coset_space(13, &d).is_err());
        assert!(signature(2, &DeltaSubgroup::full(2).unwrap()).is_err());
    }
}
