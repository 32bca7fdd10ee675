//! Points and metric spaces.
//!
//! Three kinds of space are supported:
//!
//! * `Finite`: an explicit symmetric distance matrix over points `0..n`.
//! * `Family`: a closed-form parametric family (the two-ray ℓ1 subset and the
//!   harmonic partial sums), enumerated up to a cutoff and valid up to a
//!   capacity.
//! * `Line`: an interval of the rational line with the usual metric, sampled
//!   on a grid of step `(hi - lo) / cutoff` plus explicit extra points.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Family symbols of parametric points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    X,
    U,
    A,
    Zero,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    /// A point of a finite space.
    Index(usize),
    /// A member of a parametric family: `x_n`, `u_n`, `a_n` or the base point `0`.
    Param { symbol: Symbol, n: u64 },
    /// A rational point of an interval of the real line.
    Line(Rational),
}

impl Point {
    pub fn x(n: u64) -> Point {
        Point::Param { symbol: Symbol::X, n }
    }

    pub fn u(n: u64) -> Point {
        Point::Param { symbol: Symbol::U, n }
    }

    pub fn a(n: u64) -> Point {
        Point::Param { symbol: Symbol::A, n }
    }

    pub fn zero() -> Point {
        Point::Param { symbol: Symbol::Zero, n: 0 }
    }

    pub fn line(value: Rational) -> Point {
        Point::Line(value)
    }

    /// Parses a label such as `3`, `x_3`, `u2`, `a_10`, `0`, `51/100`.
    ///
    /// The interpretation of a bare number depends on the space, so prefer
    /// [`MetricSpace::parse_point`] when a space is at hand.
    pub fn parse_param(text: &str) -> Option<Point> {
        let text = text.trim();
        if text == "0" || text.eq_ignore_ascii_case("zero") {
            return Some(Point::zero());
        }
        let mut chars = text.chars();
        let symbol = match chars.next()?.to_ascii_lowercase() {
            'x' => Symbol::X,
            'u' => Symbol::U,
            'a' => Symbol::A,
            _ => return None,
        };
        let rest = chars.as_str();
        let rest = rest.strip_prefix('_').unwrap_or(rest);
        let n = rest.parse().ok()?;
        Some(Point::Param { symbol, n })
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "{i}"),
            Point::Param { symbol: Symbol::Zero, .. } => f.write_str("0"),
            Point::Param { symbol, n } => {
                let s = match symbol {
                    Symbol::X => 'x',
                    Symbol::U => 'u',
                    Symbol::A => 'a',
                    Symbol::Zero => unreachable!(),
                };
                write!(f, "{s}_{n}")
            }
            Point::Line(v) => write!(f, "{v}"),
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Identifier of a closed-form parametric family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyId {
    /// `{x_n} ∪ {u_n} ∪ {0}` in ℓ1 with `x_n = (a + b/n) e_n`, `u_n = (c + e/n) e_n`.
    KannanL1,
    /// `{a_n : n ≥ 0}` on the real line with `a_n = Σ_{j ≤ n} 1/j`.
    Harmonic,
}

/// Coefficients of the two-ray ℓ1 family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoRay {
    pub x_base: Rational,
    pub x_slope: Rational,
    pub u_base: Rational,
    pub u_slope: Rational,
}

impl TwoRay {
    fn x_norm(&self, n: u64) -> Rational {
        &self.x_base + &self.x_slope * Rational::reciprocal_of(n)
    }

    fn u_norm(&self, n: u64) -> Rational {
        &self.u_base + &self.u_slope * Rational::reciprocal_of(n)
    }

    fn validate(&self, capacity: u64) -> Result<()> {
        let all = [&self.x_base, &self.x_slope, &self.u_base, &self.u_slope];
        if all.iter().any(|c| c.is_negative()) {
            return Err(Error::InvalidSpace("ℓ1 coefficients must be non-negative".into()));
        }
        if self.x_base.is_zero() && self.x_slope.is_zero()
            || self.u_base.is_zero() && self.u_slope.is_zero()
        {
            return Err(Error::InvalidSpace("ℓ1 family points must be non-zero".into()));
        }
        // x_n = u_n iff (xb - ub) n + (xs - us) = 0.
        let base = &self.x_base - &self.u_base;
        let slope = &self.x_slope - &self.u_slope;
        let collides = if base.is_zero() {
            slope.is_zero()
        } else {
            let n = -(slope / base);
            n.is_positive()
                && n.denom().is_one()
                && n.numer() <= &BigInt::from(capacity)
        };
        if collides {
            return Err(Error::InvalidSpace("ℓ1 family has x_n = u_n for some n".into()));
        }
        Ok(())
    }

    fn norm(&self, p: &Point) -> Rational {
        match p {
            Point::Param { symbol: Symbol::X, n } => self.x_norm(*n),
            Point::Param { symbol: Symbol::U, n } => self.u_norm(*n),
            _ => Rational::zero(),
        }
    }

    fn distance(&self, p: &Point, q: &Point) -> Rational {
        use Symbol::*;
        match (p, q) {
            (Point::Param { symbol: s, n }, Point::Param { symbol: t, n: m })
                if *s != Zero && *t != Zero && n == m =>
            {
                // Same coordinate: |coef_p - coef_q|.
                self.norm(p).dist(&self.norm(q))
            }
            // Disjoint supports (or one side is the origin): norms add.
            _ => self.norm(p) + self.norm(q),
        }
    }
}

/// Harmonic partial sums stored over the common denominator `lcm(1..=capacity)`.
#[derive(Clone, Debug)]
pub struct HarmonicTable {
    lcm: BigInt,
    scaled_prefix: Vec<BigInt>,
}

/// Ranges at most this long are summed term by term; their denominators stay small.
const DIRECT_SUM_SPAN: u64 = 48;

impl HarmonicTable {
    fn new(capacity: u64) -> Self {
        let mut lcm = BigInt::one();
        for k in 1..=capacity {
            lcm = lcm.lcm(&BigInt::from(k));
        }
        let mut scaled_prefix = Vec::with_capacity(capacity as usize + 1);
        let mut acc = BigInt::zero();
        scaled_prefix.push(acc.clone());
        for k in 1..=capacity {
            acc += &lcm / BigInt::from(k);
            scaled_prefix.push(acc.clone());
        }
        HarmonicTable { lcm, scaled_prefix }
    }

    /// `Σ_{k=i+1}^{j} 1/k` for `i ≤ j ≤ capacity`.
    fn range_sum(&self, i: u64, j: u64) -> Rational {
        if j - i <= DIRECT_SUM_SPAN {
            return (i + 1..=j).map(Rational::reciprocal_of).sum();
        }
        let numer = &self.scaled_prefix[j as usize] - &self.scaled_prefix[i as usize];
        Rational::new(numer, self.lcm.clone()).expect("lcm is positive")
    }
}

#[derive(Clone, Debug)]
pub enum Family {
    KannanL1(TwoRay),
    Harmonic(Arc<HarmonicTable>),
}

#[derive(Clone, Debug)]
pub struct FamilySpace {
    family: Family,
    scale: Rational,
    cutoff: u64,
    capacity: u64,
}

impl FamilySpace {
    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }
}

#[derive(Clone, Debug)]
pub struct FiniteSpace {
    matrix: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug)]
pub struct LineSpace {
    lo: Rational,
    hi: Rational,
    scale: Rational,
    cutoff: u64,
    extra: Vec<Rational>,
}

impl LineSpace {
    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn extra(&self) -> &[Rational] {
        &self.extra
    }
}

#[derive(Clone, Debug)]
pub enum SpaceKind {
    Finite(FiniteSpace),
    Family(FamilySpace),
    Line(LineSpace),
}

/// A metric space with exact distances. Immutable after construction.
#[derive(Clone, Debug)]
pub struct MetricSpace {
    kind: SpaceKind,
}

/// Outcome of an exhaustive triangle-inequality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleReport {
    pub points: usize,
    pub triples_checked: u64,
    /// `(p, q, r)` with `d(p, r) > d(p, q) + d(q, r)`.
    pub violation: Option<(Point, Point, Point)>,
}

impl TriangleReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Default capacity of the ℓ1 family; its map never raises parameters.
pub const L1_DEFAULT_CAPACITY: u64 = u32::MAX as u64;

impl MetricSpace {
    /// A finite space from a full distance matrix. The matrix must be square,
    /// symmetric, zero on the diagonal and positive elsewhere; the triangle
    /// inequality is checked separately by [`MetricSpace::verify_triangle`].
    pub fn finite(matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::InvalidSpace("empty space".into()));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidSpace(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if !row[i].is_zero() {
                return Err(Error::InvalidSpace(format!("d({i},{i}) = {} is not zero", row[i])));
            }
            for (j, value) in row.iter().enumerate() {
                if value != &matrix[j][i] {
                    return Err(Error::InvalidSpace(format!("d({i},{j}) != d({j},{i})")));
                }
                if i != j && !value.is_positive() {
                    return Err(Error::InvalidSpace(format!("d({i},{j}) = {value} is not positive")));
                }
            }
        }
        Ok(MetricSpace { kind: SpaceKind::Finite(FiniteSpace { matrix }) })
    }

    /// The ℓ1 family `x_n = (3 + 4/n) e_n`, `u_n = (1 + 1/n) e_n`.
    pub fn kannan_l1(cutoff: u64) -> Self {
        let coefficients = TwoRay {
            x_base: Rational::integer(3),
            x_slope: Rational::integer(4),
            u_base: Rational::integer(1),
            u_slope: Rational::integer(1),
        };
        Self::two_ray(coefficients, cutoff, L1_DEFAULT_CAPACITY).expect("valid coefficients")
    }

    pub fn two_ray(coefficients: TwoRay, cutoff: u64, capacity: u64) -> Result<Self> {
        if cutoff > capacity {
            return Err(Error::Capacity(format!("cutoff {cutoff} exceeds capacity {capacity}")));
        }
        coefficients.validate(capacity)?;
        Ok(MetricSpace {
            kind: SpaceKind::Family(FamilySpace {
                family: Family::KannanL1(coefficients),
                scale: Rational::one(),
                cutoff,
                capacity,
            }),
        })
    }

    /// Harmonic partial sums `a_0..a_cutoff`, valid up to `a_capacity`.
    pub fn harmonic(cutoff: u64, capacity: u64) -> Result<Self> {
        if cutoff > capacity {
            return Err(Error::Capacity(format!("cutoff {cutoff} exceeds capacity {capacity}")));
        }
        Ok(MetricSpace {
            kind: SpaceKind::Family(FamilySpace {
                family: Family::Harmonic(Arc::new(HarmonicTable::new(capacity))),
                scale: Rational::one(),
                cutoff,
                capacity,
            }),
        })
    }

    /// The interval `[lo, hi]` sampled on `cutoff + 1` evenly spaced points
    /// plus `extra`.
    pub fn line(lo: Rational, hi: Rational, cutoff: u64, extra: Vec<Rational>) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidSpace(format!("empty interval [{lo}, {hi}]")));
        }
        if cutoff == 0 {
            return Err(Error::Argument("line grid needs cutoff >= 1".into()));
        }
        if let Some(bad) = extra.iter().find(|v| **v < lo || **v > hi) {
            return Err(Error::InvalidSpace(format!("extra point {bad} outside [{lo}, {hi}]")));
        }
        Ok(MetricSpace {
            kind: SpaceKind::Line(LineSpace { lo, hi, scale: Rational::one(), cutoff, extra }),
        })
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, SpaceKind::Finite(_))
    }

    /// Number of points of a finite space.
    pub fn finite_len(&self) -> Option<usize> {
        match &self.kind {
            SpaceKind::Finite(f) => Some(f.matrix.len()),
            _ => None,
        }
    }

    pub fn matrix(&self) -> Option<&[Vec<Rational>]> {
        match &self.kind {
            SpaceKind::Finite(f) => Some(&f.matrix),
            _ => None,
        }
    }

    /// Default enumeration cutoff (0 for finite spaces, which ignore it).
    pub fn cutoff(&self) -> u64 {
        match &self.kind {
            SpaceKind::Finite(_) => 0,
            SpaceKind::Family(f) => f.cutoff,
            SpaceKind::Line(l) => l.cutoff,
        }
    }

    pub fn capacity(&self) -> Option<u64> {
        match &self.kind {
            SpaceKind::Family(f) => Some(f.capacity),
            _ => None,
        }
    }

    pub fn family(&self) -> Option<FamilyId> {
        match &self.kind {
            SpaceKind::Family(FamilySpace { family: Family::KannanL1(_), .. }) => Some(FamilyId::KannanL1),
            SpaceKind::Family(FamilySpace { family: Family::Harmonic(_), .. }) => Some(FamilyId::Harmonic),
            _ => None,
        }
    }

    /// The metric multiplied by `factor > 0`.
    pub fn scaled(&self, factor: &Rational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::Argument(format!("scale factor {factor} must be positive")));
        }
        let kind = match &self.kind {
            SpaceKind::Finite(f) => SpaceKind::Finite(FiniteSpace {
                matrix: f.matrix.iter().map(|row| row.iter().map(|v| v * factor).collect()).collect(),
            }),
            SpaceKind::Family(f) => SpaceKind::Family(FamilySpace { scale: &f.scale * factor, ..f.clone() }),
            SpaceKind::Line(l) => SpaceKind::Line(LineSpace { scale: &l.scale * factor, ..l.clone() }),
        };
        Ok(MetricSpace { kind })
    }

    /// Same space with a different enumeration cutoff.
    pub fn with_cutoff(&self, cutoff: u64) -> Result<Self> {
        let kind = match &self.kind {
            SpaceKind::Finite(_) => self.kind.clone(),
            SpaceKind::Family(f) => {
                if cutoff > f.capacity {
                    return Err(Error::Capacity(format!("cutoff {cutoff} exceeds capacity {}", f.capacity)));
                }
                SpaceKind::Family(FamilySpace { cutoff, ..f.clone() })
            }
            SpaceKind::Line(l) => {
                if cutoff == 0 {
                    return Err(Error::Argument("line grid needs cutoff >= 1".into()));
                }
                SpaceKind::Line(LineSpace { cutoff, ..l.clone() })
            }
        };
        Ok(MetricSpace { kind })
    }

    /// Checks that `p` is a point of this space.
    pub fn check(&self, p: &Point) -> Result<()> {
        match (&self.kind, p) {
            (SpaceKind::Finite(f), Point::Index(i)) if *i < f.matrix.len() => Ok(()),
            (SpaceKind::Family(f), Point::Param { symbol, n }) => {
                let member = match (&f.family, symbol) {
                    (Family::KannanL1(_), Symbol::X | Symbol::U) => *n >= 1,
                    (Family::KannanL1(_), Symbol::Zero) => *n == 0,
                    (Family::Harmonic(_), Symbol::A) => true,
                    _ => false,
                };
                if !member {
                    Err(Error::Domain(format!("{p} is not a member of the family")))
                } else if *n > f.capacity {
                    Err(Error::Capacity(format!("{p} exceeds family capacity {}", f.capacity)))
                } else {
                    Ok(())
                }
            }
            (SpaceKind::Line(l), Point::Line(v)) if *v >= l.lo && *v <= l.hi => Ok(()),
            _ => Err(Error::Domain(format!("{p} is not a point of this space"))),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.check(p).is_ok()
    }

    /// Parses a point label in the conventions of this space.
    pub fn parse_point(&self, text: &str) -> Result<Point> {
        let text = text.trim();
        let point = match &self.kind {
            SpaceKind::Finite(_) => Point::Index(
                text.trim_start_matches('#')
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad point index {text:?}")))?,
            ),
            SpaceKind::Family(_) => {
                Point::parse_param(text).ok_or_else(|| Error::Parse(format!("bad point label {text:?}")))?
            }
            SpaceKind::Line(_) => Point::Line(text.parse()?),
        };
        self.check(&point)?;
        Ok(point)
    }

    /// Exact distance between two points of the space.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<Rational> {
        self.check(p)?;
        self.check(q)?;
        if p == q {
            return Ok(Rational::zero());
        }
        Ok(match (&self.kind, p, q) {
            (SpaceKind::Finite(f), Point::Index(i), Point::Index(j)) => f.matrix[*i][*j].clone(),
            (SpaceKind::Family(f), _, _) => {
                let raw = match &f.family {
                    Family::KannanL1(rays) => rays.distance(p, q),
                    Family::Harmonic(table) => {
                        let (Point::Param { n: i, .. }, Point::Param { n: j, .. }) = (p, q) else {
                            unreachable!("checked above")
                        };
                        table.range_sum(*i.min(j), *i.max(j))
                    }
                };
                if f.scale.is_one() { raw } else { raw * &f.scale }
            }
            (SpaceKind::Line(l), Point::Line(a), Point::Line(b)) => {
                let raw = a.dist(b);
                if l.scale.is_one() { raw } else { raw * &l.scale }
            }
            _ => unreachable!("points were checked against the space kind"),
        })
    }

    /// All points at the default cutoff.
    pub fn points(&self) -> Vec<Point> {
        self.points_upto(self.cutoff()).expect("default cutoff is within capacity")
    }

    /// All points with parameter at most `cutoff` (grid step `1/cutoff` for
    /// line spaces; finite spaces ignore the cutoff).
    pub fn points_upto(&self, cutoff: u64) -> Result<Vec<Point>> {
        match &self.kind {
            SpaceKind::Finite(f) => Ok((0..f.matrix.len()).map(Point::Index).collect()),
            SpaceKind::Family(f) => {
                if cutoff > f.capacity {
                    return Err(Error::Capacity(format!("cutoff {cutoff} exceeds capacity {}", f.capacity)));
                }
                Ok(match f.family {
                    Family::KannanL1(_) => std::iter::once(Point::zero())
                        .chain((1..=cutoff).flat_map(|n| [Point::x(n), Point::u(n)]))
                        .collect(),
                    Family::Harmonic(_) => (0..=cutoff).map(Point::a).collect(),
                })
            }
            SpaceKind::Line(l) => {
                if cutoff == 0 {
                    return Err(Error::Argument("line grid needs cutoff >= 1".into()));
                }
                let width = &l.hi - &l.lo;
                let step = &width / &Rational::integer(cutoff);
                let mut values: Vec<Rational> = (0..=cutoff)
                    .map(|k| &l.lo + &step * Rational::integer(k))
                    .chain(l.extra.iter().cloned())
                    .collect();
                values.sort();
                values.dedup();
                Ok(values.into_iter().map(Point::Line).collect())
            }
        }
    }

    /// Checks `d(p, r) ≤ d(p, q) + d(q, r)` exactly over every triple of
    /// enumerated points.
    pub fn verify_triangle(&self, cutoff: u64) -> Result<TriangleReport> {
        if cutoff < 1 {
            return Err(Error::Argument("cutoff must be >= 1".into()));
        }
        let points = self.points_upto(cutoff)?;
        let n = points.len();
        let mut d = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = self.distance(&points[i], &points[j])?;
                d[j][i] = v.clone();
                d[i][j] = v;
            }
        }
        let mut checked = 0u64;
        for p in 0..n {
            for r in p + 1..n {
                for q in (0..n).filter(|&q| q != p && q != r) {
                    checked += 1;
                    if d[p][r] > &d[p][q] + &d[q][r] {
                        return Ok(TriangleReport {
                            points: n,
                            triples_checked: checked,
                            violation: Some((points[p].clone(), points[q].clone(), points[r].clone())),
                        });
                    }
                }
            }
        }
        Ok(TriangleReport { points: n, triples_checked: checked, violation: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn l1_closed_forms() {
        let space = MetricSpace::kannan_l1(10);
        assert_eq!(space.distance(&Point::u(1), &Point::u(2)).unwrap(), r(7, 2));
        assert_eq!(space.distance(&Point::x(2), &Point::x(3)).unwrap(), r(6, 1) + r(4, 2) + r(4, 3));
        assert_eq!(space.distance(&Point::x(3), &Point::u(3)).unwrap(), r(2, 1) + r(1, 1));
        assert_eq!(space.distance(&Point::x(2), &Point::u(5)).unwrap(), r(4, 1) + r(4, 2) + r(1, 5));
        assert_eq!(space.distance(&Point::x(4), &Point::zero()).unwrap(), r(4, 1));
        assert_eq!(space.distance(&Point::u(4), &Point::zero()).unwrap(), r(5, 4));
        assert_eq!(space.points().len(), 21);
    }

    #[test]
    fn harmonic_distances() {
        let space = MetricSpace::harmonic(10, 200).unwrap();
        assert_eq!(space.distance(&Point::a(2), &Point::a(5)).unwrap(), r(47, 60));
        assert_eq!(space.distance(&Point::a(0), &Point::a(3)).unwrap(), r(11, 6));
        // long range goes through the prefix table
        let long = space.distance(&Point::a(3), &Point::a(150)).unwrap();
        let direct: Rational = (4..=150).map(Rational::reciprocal_of).sum();
        assert_eq!(long, direct);
    }

    #[test]
    fn distance_to_self_is_zero() {
        let space = MetricSpace::kannan_l1(5);
        for p in space.points() {
            assert!(space.distance(&p, &p).unwrap().is_zero());
        }
    }

    #[test]
    fn unknown_points_are_domain_errors() {
        let space = MetricSpace::kannan_l1(5);
        assert!(matches!(space.distance(&Point::x(0), &Point::zero()), Err(Error::Domain(_))));
        assert!(matches!(space.distance(&Point::a(1), &Point::zero()), Err(Error::Domain(_))));
        assert!(matches!(space.distance(&Point::Index(0), &Point::zero()), Err(Error::Domain(_))));
        let harmonic = MetricSpace::harmonic(5, 6).unwrap();
        assert!(matches!(harmonic.distance(&Point::a(7), &Point::a(0)), Err(Error::Capacity(_))));
    }

    #[test]
    fn triangle_checks() {
        assert!(MetricSpace::kannan_l1(10).verify_triangle(10).unwrap().holds());
        let two = MetricSpace::finite(vec![vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(0, 1)]]).unwrap();
        assert!(two.verify_triangle(1).unwrap().holds());
        let bad = MetricSpace::finite(vec![
            vec![r(0, 1), r(1, 1), r(10, 1)],
            vec![r(1, 1), r(0, 1), r(1, 1)],
            vec![r(10, 1), r(1, 1), r(0, 1)],
        ])
        .unwrap();
        let report = bad.verify_triangle(1).unwrap();
        assert_eq!(report.violation, Some((Point::Index(0), Point::Index(1), Point::Index(2))));
        assert!(bad.verify_triangle(0).is_err());
    }

    #[test]
    fn finite_construction_rejects_non_metrics() {
        assert!(MetricSpace::finite(vec![vec![r(0, 1), r(1, 1)], vec![r(2, 1), r(0, 1)]]).is_err());
        assert!(MetricSpace::finite(vec![vec![r(1, 1)]]).is_err());
        assert!(MetricSpace::finite(vec![vec![r(0, 1), r(0, 1)], vec![r(0, 1), r(0, 1)]]).is_err());
        assert!(MetricSpace::finite(vec![]).is_err());
    }

    #[test]
    fn two_ray_rejects_colliding_points() {
        let colliding = TwoRay {
            x_base: r(1, 1),
            x_slope: r(0, 1),
            u_base: r(0, 1),
            u_slope: r(2, 1),
        };
        // u_2 = 1 = x_2
        assert!(MetricSpace::two_ray(colliding.clone(), 5, 10).is_err());
        // fine when the capacity stops before n = 2
        assert!(MetricSpace::two_ray(colliding, 1, 1).is_ok());
    }

    #[test]
    fn line_grid_includes_extras() {
        let space = MetricSpace::line(r(0, 1), r(1, 1), 3, vec![r(1, 2)]).unwrap();
        let labels: Vec<String> = space.points().iter().map(|p| p.to_string()).collect();
        assert_eq!(labels, ["0/1", "1/3", "1/2", "2/3", "1/1"]);
        assert!(space.parse_point("2").is_err());
        assert_eq!(space.parse_point("0.5").unwrap(), Point::line(r(1, 2)));
    }

    #[test]
    fn labels_parse_back() {
        for p in [Point::x(3), Point::u(12), Point::a(0), Point::zero()] {
            assert_eq!(Point::parse_param(&p.to_string()), Some(p));
        }
        assert_eq!(Point::parse_param("x3"), Some(Point::x(3)));
        assert_eq!(Point::parse_param("q_3"), None);
    }

    #[test]
    fn scaling_multiplies_distances() {
        let c = r(3, 2);
        let space = MetricSpace::harmonic(6, 7).unwrap();
        let scaled = space.scaled(&c).unwrap();
        assert_eq!(
            scaled.distance(&Point::a(1), &Point::a(4)).unwrap(),
            space.distance(&Point::a(1), &Point::a(4)).unwrap() * &c
        );
        assert!(space.scaled(&Rational::zero()).is_err());
    }
}
