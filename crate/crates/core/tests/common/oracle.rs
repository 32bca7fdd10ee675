//! Independent recomputations: sparse ℓ1 vectors and running harmonic sums.

use std::collections::BTreeMap;

use fixlab::{MetricSpace, Modulus, Point, Rational, SelfMap};

use super::{harmonic_sums, r};

/// Points of the ℓ1 family as sparse coefficient vectors.
pub fn l1_vector(p: &Point) -> BTreeMap<u64, Rational> {
    let mut v = BTreeMap::new();
    match p.to_string().split_once('_') {
        Some(("x", n)) => {
            let n: i64 = n.parse().unwrap();
            v.insert(n as u64, &r(3, 1) + &r(4, n));
        }
        Some(("u", n)) => {
            let n: i64 = n.parse().unwrap();
            v.insert(n as u64, &r(1, 1) + &r(1, n));
        }
        _ => assert_eq!(p, &Point::zero()),
    }
    v
}

pub fn l1_norm_of_difference(a: &BTreeMap<u64, Rational>, b: &BTreeMap<u64, Rational>) -> Rational {
    let mut keys: Vec<u64> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    keys.iter()
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(k).cloned().unwrap_or_else(Rational::zero);
            (&x - &y).abs()
        })
        .sum()
}

/// δ*(ε) by direct enumeration over all pairs of the ℓ1 family, using the
/// vector oracle for every distance.
pub fn cjm_k_l1(cutoff: u64, eps: &Rational) -> Modulus {
    let space = MetricSpace::kannan_l1(cutoff);
    let map = SelfMap::L1Collapse;
    let points = space.points();
    let d = |p: &Point, q: &Point| l1_norm_of_difference(&l1_vector(p), &l1_vector(q));
    let mut best: Option<Rational> = None;
    for (a, p) in points.iter().enumerate() {
        for q in &points[a + 1..] {
            let (tp, tq) = (map.apply(p).unwrap(), map.apply(q).unwrap());
            let conclusion = d(&tp, &tq);
            if &conclusion > eps {
                let premise = (&d(p, &tp) + &d(q, &tq)).half();
                let slack = &premise - eps;
                if best.as_ref().is_none_or(|b| &slack < b) {
                    best = Some(slack);
                }
            }
        }
    }
    best.map_or(Modulus::Infinite, Modulus::Finite)
}

/// B1 on the harmonic orbit of `a_0` at prefix `n` by enumerating every
/// `i < j ≤ n - 1` over the accumulated partial sums.
pub fn b1_brute_force(n: usize, eps: &Rational) -> Modulus {
    let h = harmonic_sums(n as u64 + 1);
    let mut best: Option<Rational> = None;
    for i in 0..n {
        for j in i + 1..n {
            let conclusion = &h[j + 1] - &h[i + 1];
            if &conclusion > eps {
                let slack = &(&h[j] - &h[i]) - eps;
                if best.as_ref().is_none_or(|b| &slack < b) {
                    best = Some(slack);
                }
            }
        }
    }
    best.map_or(Modulus::Infinite, Modulus::Finite)
}

/// The same minimum using that both sides grow with `j`: for each `i` only
/// the first violating `j` matters.
pub fn b1_two_pointer(n: usize, eps: &Rational) -> Modulus {
    let h = harmonic_sums(n as u64 + 1);
    let mut best: Option<Rational> = None;
    let mut j = 1;
    for i in 0..n {
        j = j.max(i + 1);
        while j < n && &(&h[j + 1] - &h[i + 1]) <= eps {
            j += 1;
        }
        if j == n {
            break;
        }
        let slack = &(&h[j] - &h[i]) - eps;
        if best.as_ref().is_none_or(|b| &slack < b) {
            best = Some(slack);
        }
    }
    best.map_or(Modulus::Infinite, Modulus::Finite)
}

