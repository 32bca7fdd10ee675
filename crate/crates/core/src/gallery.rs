//! Built-in example instances, each with a list of facts that can be
//! re-checked against the library.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::conditions::{
    check_kannan_constant, check_pointwise, kannan_equivalence_audit, modulus_at, Assertion, CaseGaps, Condition, Domain,
    PairSet, Verdict,
};
use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::orbit::{picard_orbit, solve_fixed_point};
use crate::scalar::{Modulus, Rational};
use crate::space::{MetricSpace, Point};

/// Interval examples are sampled on the grid of step `1/GRID_STEPS`
/// regardless of the requested cutoff.
pub const GRID_STEPS: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GalleryId {
    /// `Tx = x/2` on `[0, 1]`.
    Halving,
    /// `Tx = x/4` on `[0, 1/2]`, `x/5` on `(1/2, 1]`.
    Piecewise,
    /// The collapsing map on the two-ray ℓ1 family.
    KannanL1,
    /// The shift on the harmonic partial sums.
    Harmonic,
}

impl GalleryId {
    pub const ALL: [GalleryId; 4] = [GalleryId::Halving, GalleryId::Piecewise, GalleryId::KannanL1, GalleryId::Harmonic];

    pub fn name(self) -> &'static str {
        match self {
            GalleryId::Halving => "HALVING",
            GalleryId::Piecewise => "PIECEWISE",
            GalleryId::KannanL1 => "KANNAN_L1",
            GalleryId::Harmonic => "HARMONIC",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            GalleryId::Halving => "Tx = x/2 on [0,1]",
            GalleryId::Piecewise => "Tx = x/4 on [0,1/2], x/5 on (1/2,1]",
            GalleryId::KannanL1 => "x_n -> u_n -> 0 on the l1 family {x_n, u_n, 0}",
            GalleryId::Harmonic => "a_n -> a_(n+1) on the harmonic partial sums",
        }
    }
}

impl fmt::Display for GalleryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GalleryId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        GalleryId::ALL
            .into_iter()
            .find(|id| id.name() == key || id.name().replace('_', "") == key)
            .ok_or_else(|| Error::Parse(format!("unknown gallery id {s:?}")))
    }
}

impl Serialize for GalleryId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// The operation that re-derives a fact, together with its expected outcome.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "checker", rename_all = "snake_case")]
pub enum Checker {
    /// `check_pointwise` fails with exactly this witness.
    PointwiseWitness { condition: Condition, p: Point, q: Point, premise: Rational, conclusion: Rational },
    /// `check_pointwise` over all enumerated pairs returns this verdict.
    PointwiseVerdict { condition: Condition, verdict: Verdict },
    /// CM_B on the harmonic shift: `d(a_n,a_m) − d(Ta_n,Ta_m) = 1/(n+1) − 1/(m+1) > 0`
    /// checked for every pair up to the cutoff.
    HarmonicContraction,
    /// `check_kannan_constant` on every enumerated pair.
    KannanConstant { alpha: Rational },
    /// A list of exact distances.
    Distances { values: Vec<(Point, Point, Rational)> },
    /// `modulus_at` equals the value.
    ModulusEquals { condition: Condition, domain: Domain, eps: Rational, value: Modulus },
    /// `modulus_at` is positive at every ε.
    ModulusPositive { condition: Condition, domain: Domain, eps: Vec<Rational> },
    /// The first gaps of the Picard orbit.
    OrbitGaps { start: Point, gaps: Vec<Rational> },
    /// `kannan_equivalence_audit` confirms the moduli and reports these gaps.
    CaseGaps { start: Point, prefix: usize, delta1: Rational, delta2: Rational },
    /// `solve_fixed_point` reaches the point after this many iterations.
    FixedPoint { start: Point, point: Point, iterations: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifiedFact {
    pub description: String,
    #[serde(flatten)]
    pub checker: Checker,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactResult {
    pub description: String,
    pub passed: bool,
    pub observed: String,
    /// Why the fact failed, with exact values.
    pub discrepancy: Option<String>,
}

fn outcome(observed: String, discrepancy: Option<String>) -> FactResult {
    FactResult { description: String::new(), passed: discrepancy.is_none(), observed, discrepancy }
}

fn compare<T: PartialEq + fmt::Display>(what: &str, expected: &T, observed: &T) -> Option<String> {
    (expected != observed).then(|| format!("{what}: expected {expected}, observed {observed}"))
}

impl CertifiedFact {
    fn new(description: impl Into<String>, checker: Checker) -> Self {
        CertifiedFact { description: description.into(), checker }
    }

    /// Runs the bound operation. Library errors count as failures.
    pub fn check(&self, space: &MetricSpace, map: &SelfMap) -> FactResult {
        let mut result = match self.run(space, map) {
            Ok(r) => r,
            Err(e) => outcome(format!("error: {e}"), Some(format!("checker raised an error: {e}"))),
        };
        result.description = self.description.clone();
        result
    }

    fn run(&self, space: &MetricSpace, map: &SelfMap) -> Result<FactResult> {
        Ok(match &self.checker {
            Checker::PointwiseWitness { condition, p, q, premise, conclusion } => {
                let pairs = PairSet::Explicit(vec![(p.clone(), q.clone())]);
                let report = check_pointwise(*condition, space, map, &pairs)?;
                match report.witness {
                    None => outcome(report.verdict.to_string(), Some(format!("expected a witness, got {}", report.verdict))),
                    Some(w) => {
                        let c = w.constraint;
                        let observed = format!("{} > {}", c.conclusion, c.premise);
                        let discrepancy =
                            compare("conclusion", conclusion, &c.conclusion).or_else(|| compare("premise", premise, &c.premise));
                        outcome(observed, discrepancy)
                    }
                }
            }
            Checker::PointwiseVerdict { condition, verdict } => {
                let report = check_pointwise(*condition, space, map, &PairSet::All { cutoff: None })?;
                let mut discrepancy = compare("verdict", verdict, &report.verdict);
                if let (Some(d), Some(w)) = (discrepancy.as_mut(), report.witness.as_ref()) {
                    let c = &w.constraint;
                    d.push_str(&format!(" at ({}, {}): {} vs {}", c.p, c.q, c.conclusion, c.premise));
                }
                outcome(format!("{} over {} pairs", report.verdict, report.checked), discrepancy)
            }
            Checker::HarmonicContraction => {
                let points = space.points();
                let images = points.iter().map(|p| map.apply_in(space, p)).collect::<Result<Vec<_>>>()?;
                let indices: Vec<u64> = points
                    .iter()
                    .map(|p| match p {
                        Point::Param { n, .. } => Ok(*n),
                        other => Err(Error::Domain(format!("{other} is not a harmonic point"))),
                    })
                    .collect::<Result<_>>()?;
                let mut discrepancy = None;
                'outer: for a in 0..points.len() {
                    for b in a + 1..points.len() {
                        let before = space.distance(&points[a], &points[b])?;
                        let after = space.distance(&images[a], &images[b])?;
                        let (n, m) = (indices[a].min(indices[b]), indices[a].max(indices[b]));
                        let drop = &Rational::reciprocal_of(n + 1) - &Rational::reciprocal_of(m + 1);
                        if &before - &after != drop || !drop.is_positive() {
                            discrepancy = Some(format!(
                                "at ({}, {}): d = {before}, d(T.,T.) = {after}, expected drop {drop}",
                                points[a], points[b]
                            ));
                            break 'outer;
                        }
                    }
                }
                let pairs = points.len() * (points.len() - 1) / 2;
                outcome(format!("drop 1/(n+1) - 1/(m+1) verified on {pairs} pairs"), discrepancy)
            }
            Checker::KannanConstant { alpha } => {
                let report = check_kannan_constant(space, map, &space.points(), alpha)?;
                let discrepancy = report.witness.as_ref().map(|c| {
                    format!("at ({}, {}): d(Tx,Ty) = {} > {}", c.p, c.q, c.conclusion, c.premise)
                });
                outcome(format!("holds = {} over {} pairs", report.holds, report.pairs_checked), discrepancy)
            }
            Checker::Distances { values } => {
                let mut observed = Vec::new();
                let mut discrepancy = None;
                for (p, q, expected) in values {
                    let d = space.distance(p, q)?;
                    if discrepancy.is_none() {
                        discrepancy = compare(&format!("d({p}, {q})"), expected, &d);
                    }
                    observed.push(format!("d({p}, {q}) = {d}"));
                }
                outcome(observed.join(", "), discrepancy)
            }
            Checker::ModulusEquals { condition, domain, eps, value } => {
                let m = modulus_at(*condition, space, map, domain, eps)?;
                outcome(format!("{condition} at eps {eps} on {domain}: {m}"), compare("modulus", value, &m))
            }
            Checker::ModulusPositive { condition, domain, eps } => {
                let mut observed = Vec::new();
                let mut discrepancy = None;
                for e in eps {
                    let m = modulus_at(*condition, space, map, domain, e)?;
                    if discrepancy.is_none() && !m.is_positive() {
                        discrepancy = Some(format!("{condition} modulus at eps {e} is {m}"));
                    }
                    observed.push(format!("{e}: {m}"));
                }
                outcome(observed.join(", "), discrepancy)
            }
            Checker::OrbitGaps { start, gaps } => {
                let orbit = picard_orbit(space, map, start, gaps.len())?;
                let got = orbit.prefix_gaps(gaps.len())?;
                let discrepancy = gaps
                    .iter()
                    .zip(&got)
                    .enumerate()
                    .find(|(_, (e, g))| e != g)
                    .map(|(n, (e, g))| format!("s_{n}: expected {e}, observed {g}"));
                outcome(format!("{} gaps from {start}", got.len()), discrepancy)
            }
            Checker::CaseGaps { start, prefix, delta1, delta2 } => {
                let report = kannan_equivalence_audit(space, map, start, *prefix, &[
                    Rational::ratio(1, 2),
                    Rational::one(),
                    Rational::integer(2),
                ])?;
                match report.case_gaps {
                    CaseGaps::Computed { delta1: d1, delta2: d2, .. } => {
                        let discrepancy = match &report.equivalence {
                            Assertion::Confirmed => None,
                            other => Some(format!("equivalence not confirmed: {other:?}")),
                        }
                        .or_else(|| compare("delta1", delta1, &d1))
                        .or_else(|| compare("delta2", delta2, &d2));
                        outcome(format!("delta1 = {d1}, delta2 = {d2}"), discrepancy)
                    }
                    CaseGaps::Skipped { reason } => outcome(format!("skipped: {reason}"), Some(format!("gaps skipped: {reason}"))),
                }
            }
            Checker::FixedPoint { start, point, iterations } => {
                let report = solve_fixed_point(space, map, start, 2 * iterations + 2, &Rational::zero(), &[])?;
                let observed = format!(
                    "{} after {} iterations",
                    report.point.as_ref().map_or("none".to_string(), ToString::to_string),
                    report.iterations
                );
                let discrepancy = match &report.point {
                    Some(z) if z == point && report.found => compare("iterations", iterations, &report.iterations),
                    _ => Some(format!("expected fixed point {point}, observed {observed}")),
                };
                outcome(observed, discrepancy)
            }
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GalleryInstance {
    pub id: GalleryId,
    pub cutoff: u64,
    #[serde(skip)]
    pub space: MetricSpace,
    #[serde(skip)]
    pub map: SelfMap,
    pub facts: Vec<CertifiedFact>,
}

fn r(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn line(v: Rational) -> Point {
    Point::line(v)
}

/// Constructs the space (truncated at `cutoff`), the map and the facts.
pub fn build(id: GalleryId, cutoff: u64) -> Result<GalleryInstance> {
    if cutoff < 3 {
        return Err(Error::Argument(format!("gallery cutoff must be >= 3, got {cutoff}")));
    }
    let n = cutoff as i64;
    let (space, map, facts) = match id {
        GalleryId::Halving => {
            let space = MetricSpace::line(r(0, 1), r(1, 1), GRID_STEPS, vec![r(0, 1), r(1, 2), r(1, 1)])?;
            let map = SelfMap::Linear { factor: r(1, 2) };
            let facts = vec![
                CertifiedFact::new("CM_K fails on the pair (1, 0): d(T1,T0) = 1/2 > 1/4", Checker::PointwiseWitness {
                    condition: Condition::CmK,
                    p: line(r(1, 1)),
                    q: line(r(0, 1)),
                    premise: r(1, 4),
                    conclusion: r(1, 2),
                }),
                CertifiedFact::new("CM_B holds on every pair of the grid", Checker::PointwiseVerdict {
                    condition: Condition::CmB,
                    verdict: Verdict::HoldsOnTruncation,
                }),
                CertifiedFact::new("the orbit of 1 has gaps 1/2, 1/4, 1/8, ...", Checker::OrbitGaps {
                    start: line(r(1, 1)),
                    gaps: (1..=12).map(|k| Rational::reciprocal_of(1 << k)).collect(),
                }),
            ];
            (space, map, facts)
        }
        GalleryId::Piecewise => {
            let space = MetricSpace::line(r(0, 1), r(1, 1), GRID_STEPS, vec![r(1, 2), r(51, 100)])?;
            let map = SelfMap::PiecewiseLinear { breakpoint: r(1, 2), left: r(1, 4), right: r(1, 5) };
            let facts = vec![
                CertifiedFact::new("CM_B fails on (1/2, 51/100): d(Tx,Ty) = 23/1000 > 1/100", Checker::PointwiseWitness {
                    condition: Condition::CmB,
                    p: line(r(1, 2)),
                    q: line(r(51, 100)),
                    premise: r(1, 100),
                    conclusion: r(23, 1000),
                }),
                CertifiedFact::new("Kannan constant 1/3 holds on the grid of step 1/1000", Checker::KannanConstant {
                    alpha: r(1, 3),
                }),
                CertifiedFact::new("CM_K holds on every pair of the grid", Checker::PointwiseVerdict {
                    condition: Condition::CmK,
                    verdict: Verdict::HoldsOnTruncation,
                }),
            ];
            (space, map, facts)
        }
        GalleryId::KannanL1 => {
            let space = MetricSpace::kannan_l1(cutoff);
            let map = SelfMap::L1Collapse;
            let eps = vec![r(1, 2), r(1, 1), r(2, 1)];
            let facts = vec![
                CertifiedFact::new("closed-form distances", Checker::Distances {
                    values: vec![
                        (Point::x(1), Point::u(1), r(5, 1)),
                        (Point::x(n as u64), Point::u(n as u64), &r(2, 1) + &r(3, n)),
                        (Point::u(1), Point::zero(), r(2, 1)),
                        (Point::x(2), Point::x(3), &r(6, 1) + &(&r(4, 2) + &r(4, 3))),
                        (Point::x(2), Point::u(3), &r(4, 1) + &(&r(4, 2) + &r(1, 3))),
                        (Point::u(2), Point::u(3), &r(2, 1) + &(&r(1, 2) + &r(1, 3))),
                        (Point::x(3), Point::zero(), &r(3, 1) + &r(4, 3)),
                    ],
                }),
                CertifiedFact::new("CM_K holds on all pairs", Checker::PointwiseVerdict {
                    condition: Condition::CmK,
                    verdict: Verdict::HoldsOnTruncation,
                }),
                CertifiedFact::new(
                    format!("CJM_K modulus at eps 2 equals 3/(2N) + 3/(2(N-1)) at N = {cutoff}"),
                    Checker::ModulusEquals {
                        condition: Condition::CjmK,
                        domain: Domain::Cutoff(cutoff),
                        eps: r(2, 1),
                        value: Modulus::Finite(&r(3, 2 * n) + &r(3, 2 * (n - 1))),
                    },
                ),
                CertifiedFact::new("K_IV modulus on the orbit of x_1 is positive at eps 1/2, 1, 2", Checker::ModulusPositive {
                    condition: Condition::KIV,
                    domain: Domain::orbit(Point::x(1), cutoff as usize),
                    eps,
                }),
                CertifiedFact::new("case gaps on the orbit of x_1: delta1 = 1/2, delta2 = 3/2", Checker::CaseGaps {
                    start: Point::x(1),
                    prefix: cutoff as usize,
                    delta1: r(1, 2),
                    delta2: r(3, 2),
                }),
                CertifiedFact::new("the orbit of x_3 reaches the fixed point 0 in 2 iterations", Checker::FixedPoint {
                    start: Point::x(3),
                    point: Point::zero(),
                    iterations: 2,
                }),
            ];
            (space, map, facts)
        }
        GalleryId::Harmonic => {
            let space = MetricSpace::harmonic(cutoff, cutoff + 1)?;
            let map = SelfMap::Shift;
            let facts = vec![
                CertifiedFact::new("d(a_0, a_3) = 1 + 1/2 + 1/3 = 11/6", Checker::Distances {
                    values: vec![(Point::a(0), Point::a(3), r(11, 6))],
                }),
                CertifiedFact::new("CM_B holds on all pairs up to the cutoff by the closed-form drop", Checker::HarmonicContraction),
                CertifiedFact::new("the orbit of a_0 has gaps s_n = 1/(n+1)", Checker::OrbitGaps {
                    start: Point::a(0),
                    gaps: (1..=cutoff).map(Rational::reciprocal_of).collect(),
                }),
                CertifiedFact::new("B2 modulus at eps 1/3 on the orbit of a_0 is 2/3", Checker::ModulusEquals {
                    condition: Condition::B2,
                    domain: Domain::orbit(Point::a(0), cutoff as usize),
                    eps: r(1, 3),
                    value: Modulus::Finite(r(2, 3)),
                }),
                CertifiedFact::new("B1 modulus at eps 1 on the orbit of a_0 is positive", Checker::ModulusPositive {
                    condition: Condition::B1,
                    domain: Domain::orbit(Point::a(0), cutoff as usize),
                    eps: vec![r(1, 1)],
                }),
            ];
            (space, map, facts)
        }
    };
    Ok(GalleryInstance { id, cutoff, space, map, facts })
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificationFailure {
    pub index: usize,
    pub description: String,
    pub discrepancy: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificationReport {
    pub id: GalleryId,
    pub cutoff: u64,
    pub passed: bool,
    pub results: Vec<FactResult>,
    pub first_failure: Option<CertificationFailure>,
}

/// Checks every fact of the instance (concurrently; results keep fact order).
pub fn run_certification(id: GalleryId, cutoff: u64) -> Result<CertificationReport> {
    let instance = build(id, cutoff)?;
    let results: Vec<FactResult> = instance.facts.par_iter().map(|f| f.check(&instance.space, &instance.map)).collect();
    let first_failure = results.iter().enumerate().find(|(_, r)| !r.passed).map(|(index, r)| CertificationFailure {
        index,
        description: r.description.clone(),
        discrepancy: r.discrepancy.clone().unwrap_or_default(),
    });
    Ok(CertificationReport { id, cutoff, passed: first_failure.is_none(), results, first_failure })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in GalleryId::ALL {
            assert_eq!(id.name().parse::<GalleryId>().unwrap(), id);
        }
        assert_eq!("kannan-l1".parse::<GalleryId>().unwrap(), GalleryId::KannanL1);
        assert!("nope".parse::<GalleryId>().is_err());
    }

    #[test]
    fn small_cutoffs_are_rejected() {
        assert!(build(GalleryId::Harmonic, 2).is_err());
    }

    #[test]
    fn kannan_l1_cutoff_5_has_11_points() {
        let g = build(GalleryId::KannanL1, 5).unwrap();
        assert_eq!(g.space.points().len(), 11);
    }

    #[test]
    fn every_fact_passes_at_small_cutoff() {
        for id in [GalleryId::KannanL1, GalleryId::Harmonic] {
            let report = run_certification(id, 10).unwrap();
            assert!(report.passed, "{id}: {:?}", report.first_failure);
        }
    }

    #[test]
    fn a_wrong_fact_reports_its_discrepancy() {
        let g = build(GalleryId::Harmonic, 5).unwrap();
        let fact = CertifiedFact::new("wrong", Checker::Distances { values: vec![(Point::a(0), Point::a(3), r(2, 1))] });
        let result = fact.check(&g.space, &g.map);
        assert!(!result.passed);
        assert_eq!(result.discrepancy.unwrap(), "d(a_0, a_3): expected 2/1, observed 11/6");
    }
}
