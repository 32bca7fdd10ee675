use serde::Serialize;

use crate::error::Result;
use crate::map::SelfMap;
use crate::orbit::picard_orbit;
use crate::scalar::{Modulus, Rational};
use crate::space::{MetricSpace, Point};

use super::modulus::outcomes_admissible;
use super::pointwise::{check_pointwise, PairSet};
use super::{Condition, ConditionReport, Domain};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Assertion {
    Confirmed,
    Violated { detail: String },
    Skipped { reason: String },
}

/// The two gaps of the case analysis on an orbit reaching the fixed point
/// `z = Tᵏx`:
///
/// ```text
/// δ₁ = min_{i<k} (½ s_i − d(Tⁱ⁺¹x, z))
/// δ₂ = min_{i≤j<k} (½(s_i + s_j) − d(Tⁱ⁺¹x, Tʲ⁺¹x))
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CaseGaps {
    Computed { fixed_index: usize, fixed_point: Point, delta1: Rational, delta2: Rational },
    Skipped { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditSample {
    pub eps: Rational,
    pub k_ii: Modulus,
    /// `None` when ε lies in the K_III excluded set.
    pub k_iii: Option<Modulus>,
    pub k_iv: Modulus,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub start: Point,
    pub prefix: usize,
    /// Orbit index of the first exact fixed point, if reached within the prefix.
    pub fixed_hit: Option<usize>,
    pub samples: Vec<AuditSample>,
    /// All three moduli positive at every sample (only asserted when the orbit
    /// reaches a fixed point).
    pub equivalence: Assertion,
    pub case_gaps: CaseGaps,
    /// CM_K on all pairs of orbit points.
    pub cm_k: ConditionReport,
}

/// Evaluates K_II, K_III and K_IV on one orbit and, when the orbit reaches a
/// fixed point, checks that all three moduli are positive.
pub fn kannan_equivalence_audit(
    space: &MetricSpace,
    map: &SelfMap,
    x0: &Point,
    prefix: usize,
    eps_list: &[Rational],
) -> Result<AuditReport> {
    let orbit = picard_orbit(space, map, x0, prefix)?;
    let points = orbit.prefix(prefix)?;
    let gaps = orbit.prefix_gaps(prefix)?;
    let fixed_hit = orbit.fixed_hit.filter(|k| *k <= prefix);
    let domain = Domain::orbit(x0.clone(), prefix);

    let k_ii = outcomes_admissible(Condition::KII, space, map, &domain, eps_list)?;
    let k_iii = outcomes_admissible(Condition::KIII, space, map, &domain, eps_list)?;
    let k_iv = outcomes_admissible(Condition::KIV, space, map, &domain, eps_list)?;
    let samples: Vec<AuditSample> = eps_list
        .iter()
        .enumerate()
        .map(|(n, eps)| AuditSample {
            eps: eps.clone(),
            k_ii: k_ii[n].as_ref().map(|o| o.value.clone()).expect("K_II has no excluded ε"),
            k_iii: k_iii[n].as_ref().map(|o| o.value.clone()),
            k_iv: k_iv[n].as_ref().map(|o| o.value.clone()).expect("K_IV has no excluded ε"),
        })
        .collect();

    let equivalence = match fixed_hit {
        None => Assertion::Skipped { reason: "orbit reaches no fixed point within the prefix".into() },
        Some(_) => {
            let bad = samples.iter().find_map(|s| {
                let mut failing = Vec::new();
                if !s.k_ii.is_positive() {
                    failing.push(format!("K_II = {}", s.k_ii));
                }
                if let Some(m) = s.k_iii.as_ref().filter(|m| !m.is_positive()) {
                    failing.push(format!("K_III = {m}"));
                }
                if !s.k_iv.is_positive() {
                    failing.push(format!("K_IV = {}", s.k_iv));
                }
                (!failing.is_empty()).then(|| format!("at eps {}: {}", s.eps, failing.join(", ")))
            });
            match bad {
                None => Assertion::Confirmed,
                Some(detail) => Assertion::Violated { detail },
            }
        }
    };

    let case_gaps = match fixed_hit {
        None => CaseGaps::Skipped { reason: "orbit reaches no fixed point within the prefix".into() },
        Some(0) => CaseGaps::Skipped { reason: "the starting point is fixed".into() },
        Some(k) => {
            let z = &points[k];
            let mut delta1: Option<Rational> = None;
            let mut delta2: Option<Rational> = None;
            for i in 0..k {
                let d1 = &gaps[i].half() - &space.distance(&points[i + 1], z)?;
                if delta1.as_ref().is_none_or(|d| &d1 < d) {
                    delta1 = Some(d1);
                }
                for j in i..k {
                    let d2 = &(&gaps[i] + &gaps[j]).half() - &space.distance(&points[i + 1], &points[j + 1])?;
                    if delta2.as_ref().is_none_or(|d| &d2 < d) {
                        delta2 = Some(d2);
                    }
                }
            }
            CaseGaps::Computed {
                fixed_index: k,
                fixed_point: z.clone(),
                delta1: delta1.expect("k >= 1"),
                delta2: delta2.expect("k >= 1"),
            }
        }
    };

    let cm_k = check_pointwise(Condition::CmK, space, map, &PairSet::Among(points))?;

    Ok(AuditReport { start: x0.clone(), prefix, fixed_hit, samples, equivalence, case_gaps, cm_k })
}
