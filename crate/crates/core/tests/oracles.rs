//! Closed forms and moduli checked against independent recomputations.

mod common;

use common::oracle::{b1_brute_force, b1_two_pointer, cjm_k_l1, l1_norm_of_difference, l1_vector};
use common::{harmonic_sums, r};
use fixlab::conditions::{modulus_at, Condition, Domain};
use fixlab::gallery::{self, GalleryId};
use fixlab::{MetricSpace, Modulus, Point, Rational, SelfMap};

#[test]
fn l1_distances_match_sparse_vector_oracle() {
    let space = MetricSpace::kannan_l1(50);
    let points = space.points();
    assert_eq!(points.len(), 101);
    let vectors: Vec<_> = points.iter().map(l1_vector).collect();
    for (a, p) in points.iter().enumerate() {
        for (b, q) in points.iter().enumerate() {
            assert_eq!(space.distance(p, q).unwrap(), l1_norm_of_difference(&vectors[a], &vectors[b]), "d({p}, {q})");
        }
    }
}

#[test]
fn harmonic_distances_match_partial_sum_accumulator() {
    let space = MetricSpace::harmonic(200, 200).unwrap();
    let h = harmonic_sums(200);
    for i in 0..=200u64 {
        for j in i..=200u64 {
            let expected = &h[j as usize] - &h[i as usize];
            assert_eq!(space.distance(&Point::a(i), &Point::a(j)).unwrap(), expected);
            assert_eq!(space.distance(&Point::a(j), &Point::a(i)).unwrap(), expected);
        }
    }
}

#[test]
fn cjm_k_on_l1_matches_brute_force_and_closed_form() {
    let g = gallery::build(GalleryId::KannanL1, 100).unwrap();
    let mut previous: Option<Modulus> = None;
    for n in [3u64, 10, 100] {
        let value = modulus_at(Condition::CjmK, &g.space, &g.map, &Domain::Cutoff(n), &r(2, 1)).unwrap();
        assert_eq!(value, cjm_k_l1(n, &r(2, 1)));
        let n = n as i64;
        assert_eq!(value, Modulus::Finite(&r(3, 2 * n) + &r(3, 2 * (n - 1))));
        if let Some(p) = previous {
            assert!(value < p);
        }
        previous = Some(value);
    }
}

#[test]
fn harmonic_b1_matches_brute_force() {
    let space = MetricSpace::harmonic(300, 301).unwrap();
    for n in [5usize, 30, 100, 200] {
        for eps in [r(1, 3), r(1, 1), r(2, 1)] {
            let value = modulus_at(Condition::B1, &space, &SelfMap::Shift, &Domain::orbit(Point::a(0), n), &eps).unwrap();
            let brute = b1_brute_force(n, &eps);
            assert_eq!(value, brute, "N = {n}, eps = {eps}");
            assert_eq!(b1_two_pointer(n, &eps), brute, "N = {n}, eps = {eps}");
        }
    }
}

#[test]
fn harmonic_b2_at_one_third() {
    let space = MetricSpace::harmonic(50, 51).unwrap();
    for n in [3usize, 10, 50] {
        let value = modulus_at(Condition::B2, &space, &SelfMap::Shift, &Domain::orbit(Point::a(0), n), &r(1, 3)).unwrap();
        // gaps 1, 1/2, 1/3, ...: only s_1 = 1/2 exceeds 1/3, with premise s_0 = 1
        assert_eq!(value, Modulus::Finite(r(2, 3)));
    }
}

#[test]
fn harmonic_gaps_are_reciprocals() {
    let space = MetricSpace::harmonic(1000, 1001).unwrap();
    let orbit = fixlab::picard_orbit(&space, &SelfMap::Shift, &Point::a(0), 1001).unwrap();
    for (n, s) in orbit.gaps.iter().enumerate() {
        assert_eq!(s, &Rational::reciprocal_of(n as u64 + 1));
    }
}

#[test]
fn l1_case_gaps_by_hand() {
    // gaps along x_1 -> u_1 -> 0 are 5, 2, 0
    let space = MetricSpace::kannan_l1(10);
    let orbit = fixlab::picard_orbit(&space, &SelfMap::L1Collapse, &Point::x(1), 10).unwrap();
    assert_eq!(orbit.gaps, vec![r(5, 1), r(2, 1), r(0, 1)]);
    let z = Point::zero();
    let d1 = [
        &orbit.gaps[0].half() - &space.distance(&Point::u(1), &z).unwrap(),
        &orbit.gaps[1].half() - &space.distance(&z, &z).unwrap(),
    ];
    assert_eq!(d1, [r(1, 2), r(1, 1)]);
}
