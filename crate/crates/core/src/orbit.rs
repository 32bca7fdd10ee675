//! Picard iteration and orbit diagnostics.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::scalar::Rational;
use crate::space::{MetricSpace, Point, SpaceKind};

/// A cycle `points[start..start + period]` that the orbit re-enters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub start: usize,
    pub period: usize,
}

/// A computed Picard orbit `x, Tx, T²x, ...` with its successive gaps
/// `s_n = d(Tⁿx, Tⁿ⁺¹x)`.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub start: Point,
    pub points: Vec<Point>,
    pub gaps: Vec<Rational>,
    /// Index `k` of the first zero gap; `points[k]` is a fixed point.
    pub fixed_hit: Option<usize>,
    /// Set when the orbit revisits a non-fixed point.
    pub cycle: Option<Cycle>,
    /// The last computed gap. An upper bound on the limit of the gaps when
    /// `monotone_strict` holds.
    pub alpha_upper: Rational,
    /// `s_{n+1} < s_n` for every `n` with `s_n > 0`.
    pub monotone_strict: bool,
    /// First `n` with `0 < s_n ≤ s_{n+1}`: then `(Tⁿx, Tⁿ⁺¹x)` violates CM_B.
    pub first_non_decrease: Option<usize>,
}

impl OrbitRecord {
    /// The orbit terminated at a fixed point or entered a cycle, so every later
    /// iterate is known.
    pub fn is_closed(&self) -> bool {
        self.fixed_hit.is_some() || self.cycle.is_some()
    }

    /// `Tⁿx`, extending a closed orbit periodically.
    pub fn point_at(&self, n: usize) -> Option<&Point> {
        if n < self.points.len() {
            return self.points.get(n);
        }
        if let Some(k) = self.fixed_hit {
            return self.points.get(k);
        }
        self.cycle.map(|c| &self.points[c.start + (n - c.start) % c.period])
    }

    /// `s_n`, extending a closed orbit periodically.
    pub fn gap_at(&self, n: usize) -> Option<&Rational> {
        if n < self.gaps.len() {
            return self.gaps.get(n);
        }
        if let Some(k) = self.fixed_hit {
            return self.gaps.get(k);
        }
        self.cycle.map(|c| &self.gaps[c.start + (n - c.start) % c.period])
    }

    /// `T⁰x..Tᴺx`, or an error if the orbit was not computed that far.
    pub fn prefix(&self, n: usize) -> Result<Vec<Point>> {
        (0..=n)
            .map(|k| {
                self.point_at(k)
                    .cloned()
                    .ok_or_else(|| Error::Argument(format!("orbit of {} only has {} points", self.start, self.points.len())))
            })
            .collect()
    }

    /// Gaps `s_0..s_{N-1}` of the prefix `T⁰x..Tᴺx`.
    pub fn prefix_gaps(&self, n: usize) -> Result<Vec<Rational>> {
        (0..n)
            .map(|k| {
                self.gap_at(k)
                    .cloned()
                    .ok_or_else(|| Error::Argument(format!("orbit of {} only has {} gaps", self.start, self.gaps.len())))
            })
            .collect()
    }
}

/// Iterates `x0, T x0, ...` for up to `steps` applications of `map`, stopping
/// at an exact fixed point or, outside parametric families, at a revisited
/// point.
pub fn picard_orbit(space: &MetricSpace, map: &SelfMap, x0: &Point, steps: usize) -> Result<OrbitRecord> {
    if steps < 1 {
        return Err(Error::Argument("picard_orbit needs steps >= 1".into()));
    }
    space.check(x0)?;
    let detect_cycles = !matches!(space.kind(), SpaceKind::Family(_));
    let mut seen: HashMap<Point, usize> = HashMap::new();
    if detect_cycles {
        seen.insert(x0.clone(), 0);
    }
    let mut points = vec![x0.clone()];
    let mut gaps: Vec<Rational> = Vec::new();
    let mut fixed_hit = None;
    let mut cycle = None;
    for n in 0..steps {
        let current = &points[n];
        let next = map.apply_in(space, current)?;
        let gap = space.distance(current, &next)?;
        let is_fixed = gap.is_zero();
        let revisit = if detect_cycles && !is_fixed { seen.get(&next).copied() } else { None };
        if detect_cycles {
            seen.entry(next.clone()).or_insert(n + 1);
        }
        points.push(next);
        gaps.push(gap);
        if is_fixed {
            fixed_hit = Some(n);
            break;
        }
        if let Some(start) = revisit {
            cycle = Some(Cycle { start, period: n + 1 - start });
            break;
        }
    }
    let first_non_decrease = gaps
        .windows(2)
        .position(|w| w[0].is_positive() && w[1] >= w[0]);
    Ok(OrbitRecord {
        start: x0.clone(),
        alpha_upper: gaps.last().cloned().unwrap_or_else(Rational::zero),
        monotone_strict: first_non_decrease.is_none(),
        first_non_decrease,
        points,
        gaps,
        fixed_hit,
        cycle,
    })
}

/// Three-valued evidence for a tail property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evidence {
    EvidenceFor,
    EvidenceAgainst,
    Inconclusive,
}

/// Thresholds for [`cauchy_diagnostics`].
#[derive(Clone, Debug, Serialize)]
pub struct CauchyConfig {
    pub p_max: usize,
    pub tail_start: usize,
    /// Smallness rate: window `p` counts as small when its tail maximum is at
    /// most `p · threshold`, and the tail counts as tight when its spread is at
    /// most `threshold`.
    pub threshold: Rational,
    /// Distances above this bound are evidence against.
    pub bound: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowStat {
    pub p: usize,
    /// `max d(x_n, x_{n+p})` over the inspected tail.
    pub max: Rational,
    /// Index `n` attaining the maximum.
    pub at: usize,
    pub within_threshold: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceWitness {
    pub i: usize,
    pub j: usize,
    pub p: Point,
    pub q: Point,
    pub distance: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct CauchyReport {
    pub config: CauchyConfig,
    /// Last index inspected (exclusive).
    pub horizon: usize,
    pub windows: Vec<WindowStat>,
    /// `max_j d(x_tail_start, x_j)` over the tail; between half the tail
    /// diameter and the diameter itself.
    pub spread: Rational,
    pub spread_witness: Option<DistanceWitness>,
    pub g_cauchy: Evidence,
    pub g_cauchy_witness: Option<DistanceWitness>,
    pub cauchy: Evidence,
}

/// Tail diagnostics separating G-Cauchy (`d(x_n, x_{n+p}) → 0` for each
/// fixed `p`) from Cauchy behaviour on a computed orbit.
pub fn cauchy_diagnostics(space: &MetricSpace, orbit: &OrbitRecord, config: CauchyConfig) -> Result<CauchyReport> {
    if config.p_max == 0 {
        return Err(Error::Argument("p_max must be >= 1".into()));
    }
    let needed = config.tail_start + config.p_max + 1;
    let horizon = if orbit.is_closed() { orbit.points.len().max(needed) } else { orbit.points.len() };
    if config.p_max >= horizon || needed > horizon {
        return Err(Error::Argument(format!(
            "orbit has {} points; tail from {} with p_max {} needs {needed}",
            orbit.points.len(),
            config.tail_start,
            config.p_max
        )));
    }
    let at = |n: usize| orbit.point_at(n).expect("within horizon");

    let mut windows = Vec::with_capacity(config.p_max);
    let mut g_witness: Option<DistanceWitness> = None;
    for p in 1..=config.p_max {
        let mut best: Option<(Rational, usize)> = None;
        for n in config.tail_start..horizon - p {
            let d = space.distance(at(n), at(n + p))?;
            if best.as_ref().is_none_or(|(m, _)| d > *m) {
                best = Some((d, n));
            }
        }
        let (max, n) = best.expect("window is non-empty");
        let bound = &config.threshold * Rational::integer(p as u64);
        if max > config.bound && g_witness.is_none() {
            g_witness = Some(DistanceWitness { i: n, j: n + p, p: at(n).clone(), q: at(n + p).clone(), distance: max.clone() });
        }
        windows.push(WindowStat { p, within_threshold: max <= bound, max, at: n });
    }

    let anchor = at(config.tail_start);
    let mut spread = Rational::zero();
    let mut spread_at = config.tail_start;
    for j in config.tail_start + 1..horizon {
        let d = space.distance(anchor, at(j))?;
        if d > spread {
            spread = d;
            spread_at = j;
        }
    }
    let spread_witness = (spread_at != config.tail_start).then(|| DistanceWitness {
        i: config.tail_start,
        j: spread_at,
        p: anchor.clone(),
        q: at(spread_at).clone(),
        distance: spread.clone(),
    });

    let g_cauchy = if windows.iter().all(|w| w.within_threshold) {
        Evidence::EvidenceFor
    } else if g_witness.is_some() {
        Evidence::EvidenceAgainst
    } else {
        Evidence::Inconclusive
    };
    let cauchy = if spread > config.bound {
        Evidence::EvidenceAgainst
    } else if spread <= config.threshold {
        Evidence::EvidenceFor
    } else {
        Evidence::Inconclusive
    };
    Ok(CauchyReport {
        config,
        horizon,
        windows,
        spread,
        spread_witness: if cauchy == Evidence::EvidenceAgainst { spread_witness } else { None },
        g_cauchy,
        g_cauchy_witness: if g_cauchy == Evidence::EvidenceAgainst { g_witness } else { None },
        cauchy,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveOutcome {
    /// An exact fixed point was reached.
    Found,
    /// The gap fell to the tolerance without reaching zero.
    GapWithinTolerance,
    /// The orbit entered a cycle of non-fixed points.
    Cycle,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum UniquenessCheck {
    /// `w ≠ z` is also fixed, so `d(w,z) = d(Tw,Tz)`: CM_B and CM_K both fail at `(w, z)`.
    SecondFixedPoint { candidate: Point, distance: Rational },
    /// `w` is not fixed; the contractive inequalities at `(w, z)` are recorded.
    NotFixed { candidate: Point, cm_b_holds: bool, cm_k_holds: bool },
    SameAsFixedPoint { candidate: Point },
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointReport {
    pub found: bool,
    pub point: Option<Point>,
    pub outcome: SolveOutcome,
    /// Index of the last gap evaluated (the fixed-point index when found).
    pub iterations: usize,
    pub alpha_upper: Rational,
    /// Only an exact zero gap certifies that the gaps tend to zero.
    pub alpha_zero_certified: bool,
    pub monotone_strict: bool,
    /// `(Tⁿx, Tⁿ⁺¹x)` with `s_{n+1} ≥ s_n > 0`, a CM_B counter-witness.
    pub cm_b_counter_witness: Option<(Point, Point)>,
    pub uniqueness: Vec<UniquenessCheck>,
}

/// Follows the orbit of `x0` for gaps `s_0..s_steps`: tracks the strict
/// decrease of the gaps, stops at an exact fixed point `z` (or once a gap is
/// at most `gap_tolerance`), and tests each candidate `w` for a second fixed
/// point, which would give the impossible `d(w,z) = d(Tw,Tz) < d(w,z)`.
pub fn solve_fixed_point(
    space: &MetricSpace,
    map: &SelfMap,
    x0: &Point,
    steps: usize,
    gap_tolerance: &Rational,
    candidates: &[Point],
) -> Result<FixedPointReport> {
    if steps < 1 {
        return Err(Error::Argument("solve_fixed_point needs steps >= 1".into()));
    }
    let orbit = picard_orbit(space, map, x0, steps + 1)?;
    let stop = orbit.gaps.iter().position(|g| g <= gap_tolerance);
    let (outcome, iterations) = match (orbit.fixed_hit, stop) {
        (Some(k), Some(s)) if s == k => (SolveOutcome::Found, k),
        (_, Some(s)) => (SolveOutcome::GapWithinTolerance, s),
        (Some(k), None) => (SolveOutcome::Found, k),
        (None, None) if orbit.cycle.is_some() => (SolveOutcome::Cycle, orbit.gaps.len() - 1),
        (None, None) => (SolveOutcome::BudgetExhausted, orbit.gaps.len() - 1),
    };
    let gaps = &orbit.gaps[..=iterations];
    let first_non_decrease = gaps.windows(2).position(|w| w[0].is_positive() && w[1] >= w[0]);
    let found = outcome == SolveOutcome::Found;
    let point = found.then(|| orbit.points[iterations].clone());

    let mut uniqueness = Vec::new();
    if let Some(z) = &point {
        for w in candidates {
            uniqueness.push(check_candidate(space, map, z, w)?);
        }
    }
    Ok(FixedPointReport {
        found,
        point,
        outcome,
        iterations,
        alpha_upper: gaps[iterations].clone(),
        alpha_zero_certified: found,
        monotone_strict: first_non_decrease.is_none(),
        cm_b_counter_witness: first_non_decrease
            .map(|n| (orbit.points[n].clone(), orbit.points[n + 1].clone())),
        uniqueness,
    })
}

fn check_candidate(space: &MetricSpace, map: &SelfMap, z: &Point, w: &Point) -> Result<UniquenessCheck> {
    if w == z {
        return Ok(UniquenessCheck::SameAsFixedPoint { candidate: w.clone() });
    }
    let tw = map.apply_in(space, w)?;
    let tz = map.apply_in(space, z)?;
    let d_wz = space.distance(w, z)?;
    if space.distance(w, &tw)?.is_zero() {
        return Ok(UniquenessCheck::SecondFixedPoint { candidate: w.clone(), distance: d_wz });
    }
    let image = space.distance(&tw, &tz)?;
    let kannan = (space.distance(w, &tw)? + space.distance(z, &tz)?).half();
    Ok(UniquenessCheck::NotFixed { candidate: w.clone(), cm_b_holds: image < d_wz, cm_k_holds: image < kannan })
}
