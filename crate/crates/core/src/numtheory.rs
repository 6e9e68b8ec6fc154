//! Elementary multiplicative number theory.
//!
//! Trial division is enough for everything in this crate: levels stay below a
//! few hundred and the only primes we ever factor out of are small.

use alloc::vec::Vec;
use num_integer::Integer;

use crate::error::{domain, Result};

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs, primes strictly increasing.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Number of divisors, `∏ (e + 1)`.
    pub fn divisor_count(&self) -> usize {
        self.factors.iter().map(|&(_, e)| e as usize + 1).product()
    }

    pub fn divisors(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.divisor_count());
        out.push(1);
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(domain!("cannot factorize 0"));
    }
    let mut factors = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(Factorization { n, factors })
}

/// All positive divisors of `n`, increasing.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    Ok(factorize(n)?.divisors())
}

pub fn moebius(n: u64) -> Result<i64> {
    let f = factorize(n)?;
    if !f.is_squarefree() {
        return Ok(0);
    }
    Ok(if f.factors.len() % 2 == 0 { 1 } else { -1 })
}

pub fn euler_phi(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    Ok(f.factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product())
}

/// Index of `Γ_0(n)` in `SL_2(ℤ)`: `n ∏_{q | n} (1 + 1/q)`.
pub fn psi_index(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    Ok(f.factors
        .iter()
        .map(|&(p, e)| (p + 1) * p.pow(e - 1))
        .product())
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn is_squarefree(n: u64) -> Result<bool> {
    Ok(factorize(n)?.is_squarefree())
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128 % m as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Reduce a signed integer to `[0, m)`.
pub fn residue(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(factorize(74).unwrap().factors(), &[(2, 1), (37, 1)]);
        assert_eq!(factorize(48).unwrap().factors(), &[(2, 4), (3, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisors(2).unwrap(), [1, 2]);
        assert_eq!(divisors(3).unwrap(), [1, 3]);
        assert_eq!(divisors(12).unwrap(), [1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1).unwrap(), [1]);
    }

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius(1).unwrap(), 1);
        assert_eq!(moebius(4).unwrap(), 0);
        assert_eq!(moebius(6).unwrap(), 1);
        assert_eq!(moebius(30).unwrap(), -1);
    }

    fn phi_brute(n: u64) -> u64 {
        (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_brute(37), 36);
        assert_eq!(phi_brute(40), 16);
        assert_eq!(euler_phi(37).unwrap(), 36);
        assert_eq!(euler_phi(40).unwrap(), 16);
        assert_eq!(euler_phi(1).unwrap(), 1);
        for n in 1..500 {
            assert_eq!(euler_phi(n).unwrap(), phi_brute(n), "n = {n}");
        }
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_index(37).unwrap(), 38);
        assert_eq!(psi_index(74).unwrap(), 114);
        assert_eq!(psi_index(1).unwrap(), 1);
        // 6 = (114 / 38) * 2 is the diagonal of the level-74 form of 37a1
        assert_eq!(psi_index(74).unwrap() / psi_index(37).unwrap() * 2, 6);
    }

    #[test]
    fn moebius_sums_vanish() {
        for n in 1..=10_000u64 {
            let s: i64 = divisors(n)
                .unwrap()
                .into_iter()
                .map(|d| moebius(d).unwrap())
                .sum();
            assert_eq!(s, i64::from(n == 1), "n = {n}");
        }
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inv(3, 7), Some(5));
        assert_eq!(mod_inv(2, 4), None);
        assert_eq!(residue(-1, 37), 36);
        assert_eq!(mod_pow(2, 10, 1000), 24);
    }
}
