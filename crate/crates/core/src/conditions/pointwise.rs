use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::map::SelfMap;
use crate::scalar::Rational;
use crate::space::{MetricSpace, Point};

use super::{Condition, ConditionReport, ConstraintInstance, Verdict, Witness};

/// Which pairs a pointwise check runs over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairSet {
    /// All pairs of points enumerated at the cutoff (the space default if `None`).
    All { cutoff: Option<u64> },
    /// All pairs among the given points.
    Among(Vec<Point>),
    /// Exactly these pairs.
    Explicit(Vec<(Point, Point)>),
}

struct PointData {
    point: Point,
    image: Point,
    gap: Rational,
}

fn point_data(space: &MetricSpace, map: &SelfMap, points: &[Point]) -> Result<Vec<PointData>> {
    points
        .par_iter()
        .map(|p| {
            let image = map.apply_in(space, p)?;
            let gap = space.distance(p, &image)?;
            Ok(PointData { point: p.clone(), image, gap })
        })
        .collect()
}

/// `(premise, conclusion)` for the pair, where the condition demands
/// `conclusion < premise`.
fn pointwise_sides(cond: Condition, space: &MetricSpace, a: &PointData, b: &PointData) -> Result<(Rational, Rational)> {
    let conclusion = space.distance(&a.image, &b.image)?;
    let premise = match cond {
        Condition::CmB => space.distance(&a.point, &b.point)?,
        _ => (&a.gap + &b.gap).half(),
    };
    Ok((premise, conclusion))
}

/// Verifies CM_B or CM_K exactly on every pair, reporting the first failure
/// (lexicographic in the pair order) as a witness.
pub fn check_pointwise(cond: Condition, space: &MetricSpace, map: &SelfMap, pairs: &PairSet) -> Result<ConditionReport> {
    if !cond.is_pointwise() {
        return Err(crate::error::Error::Argument(format!("{cond} is not a pointwise condition")));
    }
    match pairs {
        PairSet::Explicit(list) => {
            let mut skipped = Vec::new();
            let mut checked = 0;
            for (p, q) in list {
                space.check(p)?;
                space.check(q)?;
                if p == q {
                    skipped.push((p.clone(), q.clone()));
                    continue;
                }
                let data = point_data(space, map, &[p.clone(), q.clone()])?;
                let (premise, conclusion) = pointwise_sides(cond, space, &data[0], &data[1])?;
                checked += 1;
                if conclusion >= premise {
                    let constraint = ConstraintInstance { i: 0, j: 1, p: p.clone(), q: q.clone(), premise, conclusion };
                    return Ok(ConditionReport {
                        condition: cond,
                        verdict: Verdict::FailsWithWitness,
                        witness: Some(Witness { constraint, eps: None }),
                        truncation: format!("{} explicit pairs", list.len()),
                        checked,
                        skipped,
                        certificate: None,
                    });
                }
            }
            Ok(ConditionReport {
                condition: cond,
                verdict: Verdict::HoldsOnTruncation,
                witness: None,
                truncation: format!("{} explicit pairs", list.len()),
                checked,
                skipped,
                certificate: None,
            })
        }
        PairSet::All { .. } | PairSet::Among(_) => {
            let (points, truncation) = match pairs {
                PairSet::All { cutoff } => {
                    let cutoff = cutoff.unwrap_or(space.cutoff());
                    (space.points_upto(cutoff)?, if space.is_finite() { "all pairs".to_string() } else { format!("all pairs at cutoff {cutoff}") })
                }
                PairSet::Among(points) => {
                    for p in points {
                        space.check(p)?;
                    }
                    let mut points = points.clone();
                    points.sort();
                    points.dedup();
                    let text = format!("all pairs among {} points", points.len());
                    (points, text)
                }
                PairSet::Explicit(_) => unreachable!(),
            };
            let data = point_data(space, map, &points)?;
            let n = data.len();
            let failure = (0..n)
                .into_par_iter()
                .map(|i| -> Result<Option<ConstraintInstance>> {
                    for j in i + 1..n {
                        let (premise, conclusion) = pointwise_sides(cond, space, &data[i], &data[j])?;
                        if conclusion >= premise {
                            return Ok(Some(ConstraintInstance {
                                i,
                                j,
                                p: data[i].point.clone(),
                                q: data[j].point.clone(),
                                premise,
                                conclusion,
                            }));
                        }
                    }
                    Ok(None)
                })
                .find_map_first(|row| match row {
                    Ok(None) => None,
                    other => Some(other),
                })
                .transpose()?
                .flatten();
            let total = n * n.saturating_sub(1) / 2;
            let exhaustive = space.is_finite() && matches!(pairs, PairSet::All { .. });
            Ok(match failure {
                Some(constraint) => ConditionReport {
                    condition: cond,
                    verdict: Verdict::FailsWithWitness,
                    // pairs in rows before i, then up to and including j
                    checked: constraint.i * n - constraint.i * (constraint.i + 1) / 2 + (constraint.j - constraint.i),
                    witness: Some(Witness { constraint, eps: None }),
                    truncation,
                    skipped: Vec::new(),
                    certificate: None,
                },
                None => ConditionReport {
                    condition: cond,
                    verdict: if exhaustive { Verdict::HoldsWithCertificate } else { Verdict::HoldsOnTruncation },
                    witness: None,
                    truncation,
                    checked: total,
                    skipped: Vec::new(),
                    certificate: exhaustive.then(|| format!("exhaustive over all {total} pairs of a finite space")),
                },
            })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KannanConstantReport {
    pub alpha: Rational,
    pub points: usize,
    pub pairs_checked: usize,
    pub holds: bool,
    /// Pair with `d(Tx,Ty) > α{d(x,Tx) + d(y,Ty)}`; premise is the right-hand side.
    pub witness: Option<ConstraintInstance>,
}

/// Checks the non-strict Kannan inequality `d(Tx,Ty) ≤ α{d(x,Tx) + d(y,Ty)}`
/// on every pair of `points`.
pub fn check_kannan_constant(space: &MetricSpace, map: &SelfMap, points: &[Point], alpha: &Rational) -> Result<KannanConstantReport> {
    let data = point_data(space, map, points)?;
    let n = data.len();
    let witness = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Option<ConstraintInstance>> {
            for j in i + 1..n {
                let conclusion = space.distance(&data[i].image, &data[j].image)?;
                let premise = alpha * &(&data[i].gap + &data[j].gap);
                if conclusion > premise {
                    return Ok(Some(ConstraintInstance {
                        i,
                        j,
                        p: data[i].point.clone(),
                        q: data[j].point.clone(),
                        premise,
                        conclusion,
                    }));
                }
            }
            Ok(None)
        })
        .find_map_first(|row| match row {
            Ok(None) => None,
            other => Some(other),
        })
        .transpose()?
        .flatten();
    Ok(KannanConstantReport {
        alpha: alpha.clone(),
        points: n,
        pairs_checked: n * n.saturating_sub(1) / 2,
        holds: witness.is_none(),
        witness,
    })
}
