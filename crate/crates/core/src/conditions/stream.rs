use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::orbit::picard_orbit;
use crate::scalar::Rational;
use crate::space::{MetricSpace, Point};

use super::{Condition, ConstraintInstance, Domain};

/// The data a condition quantifies over, computed once per (condition, domain).
pub(crate) struct Materialized {
    pub cond: Condition,
    /// Orbit prefix `T⁰x..Tᴺx`, or the enumerated points.
    pub points: Vec<Point>,
    /// Orbit gaps `s_0..s_{N-1}`, or `d(p, Tp)` per enumerated point.
    pub gaps: Vec<Rational>,
    /// `T p` per enumerated point (pair domains only).
    pub images: Vec<Point>,
}

impl Materialized {
    pub fn new(cond: Condition, space: &MetricSpace, map: &SelfMap, domain: &Domain) -> Result<Self> {
        if cond.is_pointwise() {
            return Err(Error::Argument(format!("{cond} is pointwise; it has no ε–δ constraint stream")));
        }
        match (cond.is_orbitwise(), domain) {
            (true, Domain::Orbit { start, prefix }) => {
                if *prefix < 1 {
                    return Err(Error::Argument("orbit prefix must be >= 1".into()));
                }
                let orbit = picard_orbit(space, map, start, *prefix)?;
                Ok(Materialized {
                    cond,
                    points: orbit.prefix(*prefix)?,
                    gaps: orbit.prefix_gaps(*prefix)?,
                    images: Vec::new(),
                })
            }
            (false, Domain::Cutoff(_) | Domain::Points(_)) => {
                let points = match domain {
                    Domain::Cutoff(n) => space.points_upto(*n)?,
                    Domain::Points(points) => {
                        for p in points {
                            space.check(p)?;
                        }
                        points.clone()
                    }
                    Domain::Orbit { .. } => unreachable!(),
                };
                let images = points.iter().map(|p| map.apply_in(space, p)).collect::<Result<Vec<_>>>()?;
                let gaps = points
                    .iter()
                    .zip(&images)
                    .map(|(p, tp)| space.distance(p, tp))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Materialized { cond, points, gaps, images })
            }
            (true, _) => Err(Error::Argument(format!("{cond} quantifies over an orbit; got domain {domain}"))),
            (false, _) => Err(Error::Argument(format!("{cond} quantifies over point pairs; got domain {domain}"))),
        }
    }

    /// Number of orbit gaps (`N`) or enumerated points.
    fn len(&self) -> usize {
        if self.cond.is_orbitwise() { self.gaps.len() } else { self.points.len() }
    }

    /// Calls `f(i, j, premise, conclusion)` once per constraint. The order is
    /// not lexicographic for B1 (it walks diagonals to reuse distances).
    pub fn visit(&self, space: &MetricSpace, mut f: impl FnMut(usize, usize, &Rational, &Rational)) -> Result<()> {
        let n = self.len();
        let pts = &self.points;
        let s = &self.gaps;
        match self.cond {
            Condition::B2 => {
                for i in 0..n.saturating_sub(1) {
                    f(i, i + 1, &s[i], &s[i + 1]);
                }
            }
            Condition::KII => {
                for i in 0..n.saturating_sub(1) {
                    let premise = (&s[i] + &s[i + 1]).half();
                    f(i, i + 1, &premise, &s[i + 1]);
                }
            }
            Condition::B1 => {
                // Conclusion of (i, i+t) is the premise of (i+1, i+1+t).
                for t in 1..n {
                    let mut premise = space.distance(&pts[0], &pts[t])?;
                    for i in 0..n - t {
                        let conclusion = space.distance(&pts[i + 1], &pts[i + 1 + t])?;
                        f(i, i + t, &premise, &conclusion);
                        premise = conclusion;
                    }
                }
            }
            Condition::KIII | Condition::KIV => {
                for i in 0..n {
                    for j in i + 1..n {
                        let premise = (&s[i] + &s[j]).half();
                        let conclusion = space.distance(&pts[i + 1], &pts[j + 1])?;
                        f(i, j, &premise, &conclusion);
                    }
                }
            }
            Condition::CjmB => {
                for i in 0..n {
                    for j in i + 1..n {
                        let premise = space.distance(&pts[i], &pts[j])?;
                        let conclusion = space.distance(&self.images[i], &self.images[j])?;
                        f(i, j, &premise, &conclusion);
                    }
                }
            }
            Condition::CjmK => {
                for i in 0..n {
                    for j in i + 1..n {
                        let premise = (&s[i] + &s[j]).half();
                        let conclusion = space.distance(&self.images[i], &self.images[j])?;
                        f(i, j, &premise, &conclusion);
                    }
                }
            }
            Condition::CmB | Condition::CmK => unreachable!("rejected in new"),
        }
        Ok(())
    }

    pub fn instance(&self, i: usize, j: usize, premise: Rational, conclusion: Rational) -> ConstraintInstance {
        ConstraintInstance { i, j, p: self.points[i].clone(), q: self.points[j].clone(), premise, conclusion }
    }
}

/// Every constraint of `cond` on `domain`, in lexicographic index order.
///
/// Orbit conditions use the prefix `T⁰x..Tᴺx`: B2 and K_II range over
/// `0 ≤ i ≤ N-2` with `j = i + 1`; B1, K_III and K_IV over `0 ≤ i < j ≤ N-1`.
/// Pair conditions range over distinct enumerated points `p_i, p_j` with `i < j`.
pub fn constraint_stream(
    cond: Condition,
    space: &MetricSpace,
    map: &SelfMap,
    domain: &Domain,
) -> Result<Vec<ConstraintInstance>> {
    let data = Materialized::new(cond, space, map, domain)?;
    let mut out = Vec::new();
    data.visit(space, |i, j, premise, conclusion| {
        out.push(data.instance(i, j, premise.clone(), conclusion.clone()));
    })?;
    out.sort_by_key(|c| (c.i, c.j));
    Ok(out)
}
