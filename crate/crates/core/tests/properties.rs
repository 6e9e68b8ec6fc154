use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use xdelta_core::ellcurve::{an, ap, EllipticCurveRecord};
use xdelta_core::modcurve::{coset_space, signature};
use xdelta_core::numtheory::{divisors, euler_phi, gcd, is_prime, moebius, psi_index};
use xdelta_core::qform::{evaluate, is_positive_definite, represented_values};
use xdelta_core::units::{subgroups_containing_minus_one, DeltaSubgroup};

fn naive_phi(n: u64) -> u64 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
}

fn curve(label: &str, a: [i64; 5], conductor: u64) -> EllipticCurveRecord {
    EllipticCurveRecord {
        label: label.into(),
        a,
        conductor,
        rank: 0,
        analytic_rank: 0,
        modular_degree: 1,
        isogeny_class: label.trim_end_matches(char::is_numeric).into(),
        isogeny_degrees: BTreeMap::new(),
    }
}

proptest! {
    #[test]
    fn phi_and_psi_are_multiplicative(a in 1u64..3000, b in 1u64..3000) {
        prop_assume!(gcd(a, b) == 1);
        prop_assert_eq!(euler_phi(a * b).unwrap(), euler_phi(a).unwrap() * euler_phi(b).unwrap());
        prop_assert_eq!(psi_index(a * b).unwrap(), psi_index(a).unwrap() * psi_index(b).unwrap());
    }

    #[test]
    fn divisor_sums(n in 1u64..5000) {
        let ds = divisors(n).unwrap();
        let naive: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        prop_assert_eq!(&ds, &naive);
        let phi_sum: u64 = ds.iter().map(|&d| euler_phi(d).unwrap()).sum();
        prop_assert_eq!(phi_sum, n);
        let mu_sum: i64 = ds.iter().map(|&d| moebius(d).unwrap()).sum();
        prop_assert_eq!(mu_sum, i64::from(n == 1));
    }

    #[test]
    fn an_is_multiplicative(m in 1u64..400, n in 1u64..400) {
        prop_assume!(gcd(m, n) == 1);
        let e = curve("37a1", [0, 0, 1, -1, 0], 37);
        prop_assert_eq!(an(&e, m * n).unwrap(), an(&e, m).unwrap() * an(&e, n).unwrap());
    }

    #[test]
    fn short_vectors_match_a_box_search(a in 1i64..12, c in 1i64..12, b in -11i64..12) {
        let g = vec![vec![a, b], vec![b, c]];
        prop_assume!(is_positive_definite(&g).unwrap());
        let bound = 30;
        let got = represented_values(&g, bound).unwrap();
        // Q(x) ≥ λ_min |x|² and λ_min ≥ det / trace
        let det = (a * c - b * b) as f64;
        let r = ((bound as f64) * (a + c) as f64 / det).sqrt().ceil() as i64 + 1;
        let mut want = BTreeSet::new();
        for x in -r..=r {
            for y in -r..=r {
                let v = evaluate(&g, &[x, y]);
                if (x, y) != (0, 0) && v <= bound as i128 {
                    want.insert(v as i64);
                }
            }
        }
        prop_assert_eq!(got.values().into_iter().collect::<BTreeSet<_>>(), want);
        for (v, w) in &got.witnesses {
            prop_assert_eq!(evaluate(&g, w), *v as i128);
        }
    }
}

/// Every subgroup containing −1, found by adjoining one element at a time.
fn subgroup_lattice(n: u64) -> BTreeSet<Vec<u64>> {
    let units: Vec<u64> = (1..n).filter(|&k| gcd(k, n) == 1).collect();
    let close = |gens: &BTreeSet<u64>| {
        let mut set = gens.clone();
        loop {
            let next: BTreeSet<u64> = set
                .iter()
                .flat_map(|&x| set.iter().map(move |&y| x * y % n))
                .collect();
            if next.len() == set.len() {
                return set;
            }
            set.extend(next);
        }
    };
    let start = close(&[1, n - 1].into_iter().collect());
    let mut found: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut queue = vec![start];
    while let Some(h) = queue.pop() {
        let key: Vec<u64> = h.iter().copied().collect();
        if !found.insert(key) {
            continue;
        }
        for &u in &units {
            if !h.contains(&u) {
                let mut g = h.clone();
                g.insert(u);
                queue.push(close(&g));
            }
        }
    }
    found
}

#[test]
fn subgroup_enumeration_matches_lattice_search() {
    for n in 3..=150u64 {
        if naive_phi(n) > 100 {
            continue;
        }
        assert_eq!(euler_phi(n).unwrap(), naive_phi(n));
        let got: BTreeSet<Vec<u64>> = subgroups_containing_minus_one(n)
            .unwrap()
            .iter()
            .map(|d| d.elements().to_vec())
            .collect();
        assert_eq!(got, subgroup_lattice(n), "N = {n}");
    }
}

#[test]
fn index_is_multiplicative_in_towers() {
    for n in [35u64, 40, 48, 63, 65] {
        let subs = subgroups_containing_minus_one(n).unwrap();
        for small in &subs {
            for big in subs.iter().filter(|b| small.is_subgroup_of(b)) {
                let mu_small = signature(n, small).unwrap().mu;
                let mu_big = signature(n, big).unwrap().mu;
                assert_eq!(
                    mu_small,
                    mu_big * (big.len() / small.len()) as u64,
                    "N = {n}"
                );
            }
        }
    }
}

#[test]
fn cusp_widths_sum_to_index() {
    for n in 3..=60u64 {
        for d in subgroups_containing_minus_one(n).unwrap() {
            let cs = coset_space(n, &d).unwrap();
            assert_eq!(cs.cusp_widths().iter().sum::<u64>(), cs.len() as u64);
        }
    }
}

#[test]
fn hasse_bound() {
    let curves = [
        curve("11a1", [0, -1, 1, -10, -20], 11),
        curve("37a1", [0, 0, 1, -1, 0], 37),
        curve("389a1", [0, 1, 1, -2, 0], 389),
        curve("5077a1", [0, 0, 1, -7, 6], 5077),
    ];
    for e in &curves {
        for p in (2..2000).filter(|&p| is_prime(p)) {
            let a = ap(e, p).unwrap();
            assert!((a * a) as u64 <= 4 * p, "{} at {p}", e.label);
        }
    }
}

#[test]
fn full_group_is_not_intermediate() {
    let full = DeltaSubgroup::full(35).unwrap();
    assert!(!full.is_intermediate());
    assert!(!DeltaSubgroup::plus_minus_one(35).unwrap().is_intermediate());
}
