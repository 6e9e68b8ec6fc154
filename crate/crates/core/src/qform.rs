//! Values represented by positive definite integral quadratic forms
//! `Q(x) = Σ gram[i][j] x_i x_j`.
//!
//! Short vectors are enumerated Fincke–Pohst style from the rational `LDLᵀ`
//! decomposition, with every range test done exactly.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{domain, Result};

type Q = Ratio<i128>;

/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

fn check_shape(gram: &[Vec<i64>]) -> Result<()> {
    let n = gram.len();
    if n == 0 || n > MAX_DIM {
        return Err(domain!(
            "dimension must be between 1 and {MAX_DIM}, got {n}"
        ));
    }
    for (i, row) in gram.iter().enumerate() {
        if row.len() != n {
            return Err(domain!("Gram matrix is not square"));
        }
        for j in 0..i {
            if row[j] != gram[j][i] {
                return Err(domain!("Gram matrix is not symmetric at ({i}, {j})"));
            }
        }
    }
    Ok(())
}

/// All leading principal minors positive, computed by fraction-free
/// elimination.
pub fn is_positive_definite(gram: &[Vec<i64>]) -> Result<bool> {
    check_shape(gram)?;
    let n = gram.len();
    let mut m: Vec<Vec<i128>> = gram
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let mut prev = 1i128;
    for k in 0..n {
        // m[k][k] is now the (k+1)-th leading minor
        if m[k][k] <= 0 {
            return Ok(false);
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    Ok(true)
}

/// `Q(x)` in exact integer arithmetic.
pub fn evaluate(gram: &[Vec<i64>], x: &[i64]) -> i128 {
    let mut q = 0i128;
    for (i, row) in gram.iter().enumerate() {
        for (j, &b) in row.iter().enumerate() {
            q += b as i128 * x[i] as i128 * x[j] as i128;
        }
    }
    q
}

/// The nonzero values of `Q` up to a bound, each with one witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentedValues {
    pub gram: Vec<Vec<i64>>,
    pub bound: i64,
    /// Value to witness. The witness is the lexicographically smallest vector
    /// attaining the value among those whose first nonzero entry is positive.
    pub witnesses: BTreeMap<i64, Vec<i64>>,
}

impl RepresentedValues {
    pub fn values(&self) -> Vec<i64> {
        self.witnesses.keys().copied().collect()
    }

    pub fn contains(&self, v: i64) -> bool {
        self.witnesses.contains_key(&v)
    }

    pub fn witness(&self, v: i64) -> Option<&[i64]> {
        self.witnesses.get(&v).map(Vec::as_slice)
    }
}

/// `q[i][i]` are the pivots and `q[i][j]`, `j > i`, the multipliers in
/// `Q(x) = Σ_i q_ii (x_i + Σ_{j>i} q_ij x_j)²`.
#[allow(clippy::needless_range_loop)]
fn ldl(gram: &[Vec<i64>]) -> Vec<Vec<Q>> {
    let n = gram.len();
    let mut a: Vec<Vec<Q>> = gram
        .iter()
        .map(|r| r.iter().map(|&v| Q::from_integer(v as i128)).collect())
        .collect();
    let mut q = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        q[i][i] = a[i][i];
        for j in i + 1..n {
            q[i][j] = a[i][j] / a[i][i];
        }
        for k in i + 1..n {
            for l in i + 1..n {
                let t = q[i][k] * a[i][l];
                a[k][l] -= t;
            }
        }
    }
    q
}

struct Search<'a> {
    gram: &'a [Vec<i64>],
    q: Vec<Vec<Q>>,
    bound: Q,
    x: Vec<i64>,
    found: &'a mut dyn FnMut(&[i64]),
}

impl Search<'_> {
    fn fits(&self, i: usize, xi: i64, center: Q, budget: Q) -> bool {
        let t = Q::from_integer(xi as i128) + center;
        self.q[i][i] * t * t <= budget
    }

    fn go(&mut self, i: usize, used: Q) {
        let budget = self.bound - used;
        let mut center = Q::zero();
        for j in i + 1..self.x.len() {
            center += self.q[i][j] * Q::from_integer(self.x[j] as i128);
        }
        // the admissible x_i form an interval around −center
        let mid = (-center).floor().to_integer() as i64;
        let mut xs = Vec::new();
        let mut v = mid;
        while self.fits(i, v, center, budget) {
            xs.push(v);
            v -= 1;
        }
        let mut v = mid + 1;
        while self.fits(i, v, center, budget) {
            xs.push(v);
            v += 1;
        }
        for xi in xs {
            self.x[i] = xi;
            let t = Q::from_integer(xi as i128) + center;
            let now = used + self.q[i][i] * t * t;
            if i == 0 {
                if self.x.iter().any(|&c| c != 0) {
                    debug_assert!(Q::from_integer(evaluate(self.gram, &self.x)) == now);
                    (self.found)(&self.x);
                }
            } else {
                self.go(i - 1, now);
            }
        }
        self.x[i] = 0;
    }
}

/// Call `found` on every nonzero `x` with `Q(x) ≤ bound`.
pub fn for_each_short_vector(
    gram: &[Vec<i64>],
    bound: i64,
    found: &mut dyn FnMut(&[i64]),
) -> Result<()> {
    if !is_positive_definite(gram)? {
        return Err(domain!("quadratic form is not positive definite"));
    }
    let n = gram.len();
    let mut s = Search {
        gram,
        q: ldl(gram),
        bound: Q::from_integer(bound as i128),
        x: vec![0; n],
        found,
    };
    if bound >= 1 {
        s.go(n - 1, Q::zero());
    }
    Ok(())
}

fn sign_normalized(x: &[i64]) -> Vec<i64> {
    match x.iter().find(|&&c| c != 0) {
        Some(&c) if c < 0 => x.iter().map(|&v| -v).collect(),
        _ => x.to_vec(),
    }
}

pub fn represented_values(gram: &[Vec<i64>], bound: i64) -> Result<RepresentedValues> {
    if bound < 1 {
        return Err(domain!("bound must be positive"));
    }
    let mut witnesses: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for_each_short_vector(gram, bound, &mut |x| {
        let v = evaluate(gram, x) as i64;
        let w = sign_normalized(x);
        witnesses
            .entry(v)
            .and_modify(|cur| {
                if w < *cur {
                    *cur = w.clone();
                }
            })
            .or_insert_with(|| w.clone());
    })?;
    Ok(RepresentedValues {
        gram: gram.to_vec(),
        bound,
        witnesses,
    })
}

/// Smallest nonzero value of `Q` with a witness. A diagonal entry is always
/// attained by a basis vector, so the smallest one bounds the search.
pub fn min_nonzero(gram: &[Vec<i64>]) -> Result<(i64, Vec<i64>)> {
    check_shape(gram)?;
    let bound = (0..gram.len())
        .map(|i| gram[i][i])
        .min()
        .unwrap_or(1)
        .max(1);
    let r = represented_values(gram, bound)?;
    r.witnesses
        .into_iter()
        .next()
        .ok_or_else(|| domain!("quadratic form is not positive definite"))
}

/// A vector with `Q(x) = target`, if one exists.
pub fn represents(gram: &[Vec<i64>], target: i64) -> Result<Option<Vec<i64>>> {
    if target < 1 {
        return Ok(None);
    }
    let r = represented_values(gram, target)?;
    Ok(r.witness(target).map(<[i64]>::to_vec))
}

/// Parse `"6,-4;-4,6"` into a matrix.
pub fn parse_gram(s: &str) -> Result<Vec<Vec<i64>>> {
    let rows: Result<Vec<Vec<i64>>> = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<i64>()
                        .map_err(|_| domain!("bad Gram entry {v:?}"))
                })
                .collect()
        })
        .collect();
    let rows = rows?;
    check_shape(&rows)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn m(rows: &[&[i64]]) -> Vec<Vec<i64>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn definiteness() {
        assert!(is_positive_definite(&m(&[&[6, -4], &[-4, 6]])).unwrap());
        assert!(is_positive_definite(&m(&[&[1, 0], &[0, 1]])).unwrap());
        assert!(!is_positive_definite(&m(&[&[1, 2], &[2, 1]])).unwrap());
        assert!(is_positive_definite(&m(&[&[1, 2], &[0, 1]])).is_err());
        assert!(is_positive_definite(&m(&[&[2, 1, 1], &[1, 2, 1], &[1, 1, 1]])).unwrap());
        assert!(!is_positive_definite(&m(&[&[2, 1, 1], &[1, 2, 1], &[1, 1, 0]])).unwrap());
    }

    #[test]
    fn values() {
        let f = m(&[&[6, -4], &[-4, 6]]);
        let r = represented_values(&f, 12).unwrap();
        assert_eq!(r.values(), [4, 6]);
        assert_eq!(r.witness(4).unwrap(), [1, 1]);
        let r = represented_values(&m(&[&[12, -8], &[-8, 12]]), 7).unwrap();
        assert!(r.values().is_empty());
        assert_eq!(
            represented_values(&m(&[&[1, 0], &[0, 1]]), 2)
                .unwrap()
                .values(),
            [1, 2]
        );
        assert!(represented_values(&m(&[&[1, 2], &[2, 1]]), 5).is_err());
    }

    #[test]
    fn minima() {
        assert_eq!(min_nonzero(&m(&[&[6, -4], &[-4, 6]])).unwrap().0, 4);
        assert_eq!(min_nonzero(&m(&[&[8, -6], &[-6, 8]])).unwrap().0, 4);
        assert_eq!(min_nonzero(&m(&[&[1, 0], &[0, 1]])).unwrap().0, 1);
    }

    #[test]
    fn representation() {
        let f = m(&[&[6, -4], &[-4, 6]]);
        assert_eq!(represents(&f, 4).unwrap(), Some(vec![1, 1]));
        assert_eq!(represents(&f, 5).unwrap(), None);
        assert_eq!(represents(&m(&[&[12, -8], &[-8, 12]]), 4).unwrap(), None);
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_gram("6,-4;-4,6").unwrap(), m(&[&[6, -4], &[-4, 6]]));
        assert!(parse_gram("6,-4;-3,6").is_err());
        assert!(parse_gram("6,x").is_err());
    }
}
