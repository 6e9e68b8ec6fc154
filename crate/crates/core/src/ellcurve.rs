//! Rational elliptic curves as dataset records, and the coefficients `a_n` of
//! their newforms.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::numtheory::{factorize, is_prime, mod_pow};

/// One elliptic curve over `ℚ` as stored in the curve dataset. The model is
/// assumed globally minimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticCurveRecord {
    pub label: String,
    /// `[a1, a2, a3, a4, a6]`.
    pub a: [i64; 5],
    pub conductor: u64,
    pub rank: u32,
    pub analytic_rank: u32,
    /// Degree of the minimal parametrization `X_0(M) → E`.
    pub modular_degree: u64,
    pub isogeny_class: String,
    /// Minimal isogeny degree to every other curve of the class.
    pub isogeny_degrees: BTreeMap<String, u64>,
}

/// Reduction of a minimal model at a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    Good,
    SplitMultiplicative,
    NonSplitMultiplicative,
    Additive,
}

impl EllipticCurveRecord {
    fn b_invariants(&self) -> [i128; 4] {
        let [a1, a2, a3, a4, a6] = self.a.map(i128::from);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        [b2, b4, b6, b8]
    }

    pub fn discriminant(&self) -> i128 {
        let [b2, b4, b6, b8] = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    pub fn c4(&self) -> i128 {
        let [b2, b4, _, _] = self.b_invariants();
        b2 * b2 - 24 * b4
    }

    pub fn c6(&self) -> i128 {
        let [b2, b4, b6, _] = self.b_invariants();
        -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6
    }

    /// A prime `p ≥ 5` at which the model is not minimal. Minimality at 2
    /// and 3 is taken on trust.
    fn non_minimal_prime(&self) -> Option<u64> {
        let (c4, c6, disc) = (self.c4(), self.c6(), self.discriminant());
        // p¹² | Δ bounds the search
        (5u64..)
            .take_while(|&p| (p as u128).pow(12) <= disc.unsigned_abs())
            .filter(|&p| is_prime(p))
            .find(|&p| {
                let p = p as i128;
                disc % p.pow(12) == 0 && c4 % p.pow(4) == 0 && c6 % p.pow(6) == 0
            })
    }

    /// Isogeny degree to `other`, `1` for the curve itself.
    pub fn isogeny_degree_to(&self, other: &str) -> Option<u64> {
        if other == self.label {
            return Some(1);
        }
        self.isogeny_degrees.get(other).copied()
    }

    /// Check the record's internal invariants.
    pub fn validate(&self) -> Result<()> {
        if self.label.is_empty() {
            return Err(domain!("empty label"));
        }
        let disc = self.discriminant();
        if disc == 0 {
            return Err(domain!("{}: singular model", self.label));
        }
        if self.conductor == 0 || self.modular_degree == 0 {
            return Err(domain!(
                "{}: conductor and modular degree must be positive",
                self.label
            ));
        }
        for p in factorize(self.conductor)?.primes() {
            if disc % p as i128 != 0 {
                return Err(domain!(
                    "{}: conductor prime {p} does not divide the discriminant",
                    self.label
                ));
            }
        }
        if let Some(p) = self.non_minimal_prime() {
            return Err(domain!("{}: model is not minimal at {p}", self.label));
        }
        if self.isogeny_degrees.values().any(|&d| d < 2) {
            return Err(domain!(
                "{}: isogeny degrees must be at least 2",
                self.label
            ));
        }
        Ok(())
    }

    /// Reduction type at `p`, read off the minimal model.
    pub fn reduction(&self, p: u64) -> Result<Reduction> {
        if !is_prime(p) {
            return Err(domain!("{p} is not prime"));
        }
        if self.discriminant() % p as i128 != 0 {
            return Ok(Reduction::Good);
        }
        if self.c4() % p as i128 == 0 {
            return Ok(Reduction::Additive);
        }
        let [a1, a2, a3, a4, _] = self.a.map(|x| reduce(x, p));
        let pi = p as i64;
        // the singular point: both partial derivatives vanish
        let fx = |x: u64, y: u64| {
            let (x, y) = (x as i64, y as i64);
            (a1 as i64 * y - 3 * x * x - 2 * a2 as i64 * x - a4 as i64).rem_euclid(pi)
        };
        let fy = |x: u64, y: u64| (2 * y + a1 * x + a3) % p;
        let half = p.div_ceil(2);
        let x0 = (0..p)
            .find(|&x| {
                let ys: Vec<u64> = if p == 2 {
                    alloc::vec![0, 1]
                } else {
                    alloc::vec![(p - (a1 * x + a3) % p) % p * half % p]
                };
                ys.into_iter()
                    .any(|y| fx(x, y) == 0 && fy(x, y) == 0 && self.eval(x, y, p) == 0)
            })
            .ok_or_else(|| {
                Error::InvariantViolation(alloc::format!(
                    "{}: no singular point mod {p}",
                    self.label
                ))
            })?;
        // tangent cone Y² + a1·XY − (3x0 + a2)·X²
        let c = (3 * x0 + a2) % p;
        let split = (0..p).any(|t| (t * t + a1 * t + p - c).is_multiple_of(p));
        Ok(if split {
            Reduction::SplitMultiplicative
        } else {
            Reduction::NonSplitMultiplicative
        })
    }

    fn eval(&self, x: u64, y: u64, p: u64) -> u64 {
        let [a1, a2, a3, a4, a6] = self.a.map(|v| reduce(v, p));
        let lhs = (y * y + a1 * x % p * y + a3 * y) % p;
        let rhs = (x * x % p * x + a2 * x % p * x + a4 * x + a6) % p;
        (lhs + p - rhs) % p
    }

    /// Number of points on the reduction mod `p`, including the point at
    /// infinity and, for bad `p`, the singular point.
    pub fn count_points(&self, p: u64) -> Result<u64> {
        if !is_prime(p) {
            return Err(domain!("{p} is not prime"));
        }
        let [a1, a2, a3, a4, a6] = self.a.map(|v| reduce(v, p));
        let mut affine = 0u64;
        if p == 2 {
            for x in 0..2 {
                for y in 0..2 {
                    if self.eval(x, y, 2) == 0 {
                        affine += 1;
                    }
                }
            }
        } else {
            // (2y + a1 x + a3)² = 4(x³ + a2 x² + a4 x + a6) + (a1 x + a3)²
            for x in 0..p {
                let lin = (a1 * x + a3) % p;
                let cub = (x * x % p * x + a2 * x % p * x + a4 * x + a6) % p;
                let f = (4 * cub + lin * lin) % p;
                affine += if f == 0 {
                    1
                } else if mod_pow(f, (p - 1) / 2, p) == 1 {
                    2
                } else {
                    0
                };
            }
        }
        Ok(affine + 1)
    }
}

fn reduce(x: i64, p: u64) -> u64 {
    crate::numtheory::residue(x, p)
}

const MAX_PRIME: u64 = 1_000_000;

/// Trace of Frobenius at `p`: `p + 1 − #E(F_p)` for good `p`, and `0`, `+1`,
/// `−1` for additive, split and non-split multiplicative reduction.
pub fn ap(e: &EllipticCurveRecord, p: u64) -> Result<i64> {
    if !is_prime(p) {
        return Err(domain!("{p} is not prime"));
    }
    if p > MAX_PRIME {
        return Err(domain!("prime {p} exceeds {MAX_PRIME}"));
    }
    Ok(match e.reduction(p)? {
        Reduction::Good => p as i64 + 1 - e.count_points(p)? as i64,
        Reduction::SplitMultiplicative => 1,
        Reduction::NonSplitMultiplicative => -1,
        Reduction::Additive => 0,
    })
}

/// Newform coefficients of one curve with a memo of the `a_p` seen so far.
/// Each worker owns its own table.
#[derive(Debug, Clone)]
pub struct Coefficients<'a> {
    curve: &'a EllipticCurveRecord,
    memo: BTreeMap<u64, i64>,
}

impl<'a> Coefficients<'a> {
    pub fn new(curve: &'a EllipticCurveRecord) -> Self {
        Self {
            curve,
            memo: BTreeMap::new(),
        }
    }

    pub fn ap(&mut self, p: u64) -> Result<i64> {
        if let Some(&v) = self.memo.get(&p) {
            return Ok(v);
        }
        let v = ap(self.curve, p)?;
        self.memo.insert(p, v);
        Ok(v)
    }

    pub fn an(&mut self, n: u64) -> Result<i64> {
        if n == 0 {
            return Err(domain!("a_n is indexed by n ≥ 1"));
        }
        let mut acc = 1i64;
        for &(p, k) in factorize(n)?.factors() {
            let a = self.ap(p)?;
            let bad = self.curve.conductor.is_multiple_of(p);
            let v = if bad {
                a.pow(k)
            } else {
                let (mut prev, mut cur) = (1i64, a);
                for _ in 1..k {
                    (prev, cur) = (cur, a * cur - p as i64 * prev);
                }
                cur
            };
            acc *= v;
        }
        Ok(acc)
    }
}

pub fn an(e: &EllipticCurveRecord, n: u64) -> Result<i64> {
    Coefficients::new(e).an(n)
}

/// The `a_p` for all primes up to `bound`, in order.
pub fn ap_list(e: &EllipticCurveRecord, bound: u64) -> Result<Vec<(u64, i64)>> {
    (2..=bound)
        .filter(|&p| is_prime(p))
        .map(|p| Ok((p, ap(e, p)?)))
        .collect()
}

#[cfg(test)]
pub(crate) fn curve(
    label: &str,
    a: [i64; 5],
    conductor: u64,
    rank: u32,
    deg: u64,
) -> EllipticCurveRecord {
    let class: String = label.trim_end_matches(|c: char| c.is_ascii_digit()).into();
    EllipticCurveRecord {
        label: label.into(),
        a,
        conductor,
        rank,
        analytic_rank: rank,
        modular_degree: deg,
        isogeny_class: class,
        isogeny_degrees: BTreeMap::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e37a1() -> EllipticCurveRecord {
        curve("37a1", [0, 0, 1, -1, 0], 37, 1, 2)
    }

    fn brute_ap(e: &EllipticCurveRecord, p: u64) -> i64 {
        let mut n = 1;
        for x in 0..p {
            for y in 0..p {
                if e.eval(x, y, p) == 0 {
                    n += 1;
                }
            }
        }
        p as i64 + 1 - n
    }

    #[test]
    fn ap_37a1() {
        let e = e37a1();
        assert_eq!(ap(&e, 2).unwrap(), -2);
        assert_eq!(ap(&e, 3).unwrap(), -3);
        assert_eq!(ap(&e, 5).unwrap(), -2);
        assert_eq!(ap(&e, 7).unwrap(), -1);
        assert_eq!(ap(&e, 37).unwrap(), -1);
        assert_eq!(e.reduction(37).unwrap(), Reduction::NonSplitMultiplicative);
        assert!(ap(&e, 4).is_err());
    }

    #[test]
    fn an_37a1() {
        let e = e37a1();
        assert_eq!(an(&e, 1).unwrap(), 1);
        assert_eq!(an(&e, 4).unwrap(), 2);
        assert_eq!(an(&e, 6).unwrap(), 6);
        assert!(an(&e, 0).is_err());
    }

    #[test]
    fn counting_agrees_with_brute_force_at_every_prime() {
        // bad primes included: the singular cubic has p, p + 2 or p + 1 points
        let curves = [
            e37a1(),
            curve("11a1", [0, -1, 1, -10, -20], 11, 0, 1),
            curve("14a1", [1, 0, 1, 4, -6], 14, 0, 1),
            curve("43a1", [0, 1, 1, 0, 0], 43, 1, 2),
            curve("27a1", [0, 0, 1, 0, -7], 27, 0, 1),
        ];
        for e in &curves {
            for p in (2..120).filter(|&p| is_prime(p)) {
                assert_eq!(ap(e, p).unwrap(), brute_ap(e, p), "{} at {p}", e.label);
            }
        }
        assert_eq!(
            curves[1].reduction(11).unwrap(),
            Reduction::SplitMultiplicative
        );
        assert_eq!(
            curves[2].reduction(2).unwrap(),
            Reduction::NonSplitMultiplicative
        );
        assert_eq!(curves[4].reduction(3).unwrap(), Reduction::Additive);
    }

    #[test]
    fn validation() {
        assert!(e37a1().validate().is_ok());
        assert!(curve("x1", [0, 0, 0, 0, 0], 1, 0, 1).validate().is_err());
        assert!(curve("37a1", [0, 0, 1, -1, 0], 74, 1, 2)
            .validate()
            .is_err());
        // 37a1 twisted by u = 5: a_i scaled by 5^i
        assert!(curve("37a1", [0, 0, 125, -625, 0], 37, 1, 2)
            .validate()
            .is_err());
    }
}
