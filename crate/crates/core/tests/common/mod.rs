#![allow(dead_code)]

pub mod checks;
pub mod oracle;

use fixlab::Rational;

pub fn r(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// `[H_0, H_1, ..., H_n]` by running accumulation.
pub fn harmonic_sums(n: u64) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = Rational::zero();
    out.push(acc.clone());
    for k in 1..=n {
        acc = &acc + &Rational::ratio(1, k as i64);
        out.push(acc.clone());
    }
    out
}

use fixlab::gallery::{self, GalleryId};
use fixlab::search::{enumerate_instances, Instance, SearchConfig};
use fixlab::{MetricSpace, Point, SelfMap};

/// A space and map with the orbit starts worth probing.
pub struct Case {
    pub name: String,
    pub space: MetricSpace,
    pub map: SelfMap,
    pub starts: Vec<Point>,
    /// Points for pairwise domains: the enumerated points of a family, or a
    /// coarse sample of a line grid.
    pub points: Vec<Point>,
    /// Longest orbit prefix the space can hold from every start.
    pub max_prefix: usize,
}

pub fn search_grid() -> Vec<Rational> {
    vec![r(1, 2), r(1, 1), r(3, 2), r(2, 1)]
}

pub fn gallery_cases() -> Vec<Case> {
    GalleryId::ALL
        .iter()
        .map(|&id| {
            let g = gallery::build(id, 30).unwrap();
            let (starts, points, max_prefix) = match id {
                GalleryId::Halving | GalleryId::Piecewise => {
                    let starts = vec![Point::line(r(1, 1)), Point::line(r(51, 100)), Point::line(r(1, 2))];
                    let points = (0..=20).map(|k| Point::line(r(k, 20))).chain([Point::line(r(51, 100))]).collect();
                    (starts, points, 12)
                }
                GalleryId::KannanL1 => {
                    let starts = vec![Point::x(1), Point::x(3), Point::u(2), Point::zero()];
                    (starts, g.space.points(), 12)
                }
                GalleryId::Harmonic => (vec![Point::a(0), Point::a(3)], g.space.points(), 20),
            };
            Case { name: id.name().to_string(), space: g.space, map: g.map, starts, points, max_prefix }
        })
        .collect()
}

/// `count` seeded random finite instances with at most `max_points` points.
pub fn random_instances(count: u64, seed: u64, max_points: usize) -> Vec<Instance> {
    let config = SearchConfig::random(max_points, search_grid(), count, seed);
    enumerate_instances(&config).unwrap().collect()
}

pub fn instance_case(inst: &Instance) -> Case {
    let n = inst.points();
    Case {
        name: format!("random #{}", inst.ordinal),
        space: inst.space(),
        map: inst.map(),
        starts: (0..n).map(Point::Index).collect(),
        points: (0..n).map(Point::Index).collect(),
        max_prefix: 2 * n + 1,
    }
}

/// Orbit points `T⁰x..T^{prefix}x`, computed by direct iteration.
pub fn orbit_points(map: &SelfMap, start: &Point, prefix: usize) -> Vec<Point> {
    let mut out = vec![start.clone()];
    for _ in 0..prefix {
        let next = map.apply(out.last().unwrap()).unwrap();
        out.push(next);
    }
    out
}

/// Small positive rationals for ε.
pub fn eps_samples() -> Vec<Rational> {
    vec![r(1, 10), r(1, 4), r(1, 3), r(1, 2), r(3, 4), r(1, 1), r(3, 2), r(2, 1), r(5, 1)]
}
