use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::scalar::{Modulus, Rational};
use crate::space::MetricSpace;

use super::stream::Materialized;
use super::{Condition, ConditionReport, ConstraintInstance, Domain, Verdict, Witness};

/// The default ε samples `{1/3, 1/2, 1, 2}`.
pub fn default_eps() -> Vec<Rational> {
    vec![Rational::ratio(1, 3), Rational::ratio(1, 2), Rational::one(), Rational::integer(2)]
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusOutcome {
    pub eps: Rational,
    pub value: Modulus,
    /// Size of the violation set `E = {conclusion > ε}`.
    pub violations: usize,
    pub constraints: usize,
    /// The member of `E` with the smallest premise (ties: smallest indices).
    pub witness: Option<ConstraintInstance>,
    /// For orbit domains: ε equals the first gap `s_0`, which K_III does not
    /// exclude.
    pub eps_is_s0: bool,
}

struct Best {
    premise: Rational,
    conclusion: Rational,
    i: usize,
    j: usize,
}

struct Accumulator {
    best: Option<Best>,
    violations: usize,
}

fn check_eps(cond: Condition, data: &Materialized, eps: &Rational) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::Argument(format!("ε = {eps} must be positive")));
    }
    if cond == Condition::KIII && data.gaps.iter().skip(1).any(|s| s == eps) {
        return Err(Error::Argument(format!(
            "ε = {eps} is excluded for K_III: it equals a gap d(T^k x, T^(k+1) x) with k >= 1"
        )));
    }
    Ok(())
}

/// Evaluates δ*(ε) for every ε in one pass over the constraints.
fn evaluate(
    cond: Condition,
    space: &MetricSpace,
    data: &Materialized,
    eps_list: &[Rational],
) -> Result<Vec<ModulusOutcome>> {
    for eps in eps_list {
        check_eps(cond, data, eps)?;
    }
    let mut order: Vec<usize> = (0..eps_list.len()).collect();
    order.sort_by(|&a, &b| eps_list[a].cmp(&eps_list[b]));
    let sorted: Vec<&Rational> = order.iter().map(|&k| &eps_list[k]).collect();
    let mut acc: Vec<Accumulator> = sorted.iter().map(|_| Accumulator { best: None, violations: 0 }).collect();
    let mut constraints = 0usize;

    data.visit(space, |i, j, premise, conclusion| {
        constraints += 1;
        // conclusion > ε for exactly the first `k` sorted samples
        let k = sorted.partition_point(|eps| *eps < conclusion);
        for slot in &mut acc[..k] {
            slot.violations += 1;
            let better = match &slot.best {
                None => true,
                Some(b) => premise < &b.premise || (premise == &b.premise && (i, j) < (b.i, b.j)),
            };
            if better {
                slot.best = Some(Best { premise: premise.clone(), conclusion: conclusion.clone(), i, j });
            }
        }
    })?;

    let s0 = if cond.is_orbitwise() { data.gaps.first() } else { None };
    let mut out: Vec<Option<ModulusOutcome>> = vec![None; eps_list.len()];
    for (slot, (&k, eps)) in acc.into_iter().zip(order.iter().zip(sorted)) {
        let (value, witness) = match slot.best {
            None => (Modulus::Infinite, None),
            Some(b) => (
                Modulus::Finite(&b.premise - eps),
                Some(data.instance(b.i, b.j, b.premise, b.conclusion)),
            ),
        };
        out[k] = Some(ModulusOutcome {
            eps: eps.clone(),
            value,
            violations: slot.violations,
            constraints,
            witness,
            eps_is_s0: s0 == Some(eps),
        });
    }
    Ok(out.into_iter().map(|o| o.expect("every sample evaluated")).collect())
}

/// δ*(ε) at each sample, or `None` where ε is in the K_III excluded set.
pub(crate) fn outcomes_admissible(
    cond: Condition,
    space: &MetricSpace,
    map: &SelfMap,
    domain: &Domain,
    eps_list: &[Rational],
) -> Result<Vec<Option<ModulusOutcome>>> {
    let data = Materialized::new(cond, space, map, domain)?;
    let admissible: Vec<bool> = eps_list.iter().map(|e| check_eps(cond, &data, e).is_ok()).collect();
    if let Some(bad) = eps_list.iter().find(|e| !e.is_positive()) {
        return Err(Error::Argument(format!("ε = {bad} must be positive")));
    }
    let usable: Vec<Rational> = eps_list.iter().zip(&admissible).filter(|(_, ok)| **ok).map(|(e, _)| e.clone()).collect();
    let mut outcomes = evaluate(cond, space, &data, &usable)?.into_iter();
    Ok(admissible.into_iter().map(|ok| if ok { outcomes.next() } else { None }).collect())
}

/// δ*(ε) with its witness and violation count.
pub fn modulus_detail(
    cond: Condition,
    space: &MetricSpace,
    map: &SelfMap,
    domain: &Domain,
    eps: &Rational,
) -> Result<ModulusOutcome> {
    let data = Materialized::new(cond, space, map, domain)?;
    Ok(evaluate(cond, space, &data, std::slice::from_ref(eps))?.remove(0))
}

/// δ*(ε) = min over the violation set of (premise − ε), or `+∞` when the
/// violation set is empty. The condition holds at ε on the domain iff the
/// value is positive.
pub fn modulus_at(cond: Condition, space: &MetricSpace, map: &SelfMap, domain: &Domain, eps: &Rational) -> Result<Modulus> {
    Ok(modulus_detail(cond, space, map, domain, eps)?.value)
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusSample {
    pub domain: Domain,
    pub depth: u64,
    pub eps: Rational,
    pub delta: Modulus,
    pub violations: usize,
    pub constraints: usize,
    pub eps_is_s0: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExcludedSet {
    pub domain: Domain,
    pub values: Vec<Rational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusProfile {
    pub condition: Condition,
    /// Ordered by domain (as given), then ε (as given).
    pub samples: Vec<ModulusSample>,
    /// K_III only: the gaps `s_k`, `k ≥ 1`, of each orbit prefix.
    pub excluded_eps: Vec<ExcludedSet>,
}

impl ModulusProfile {
    pub fn values_at(&self, eps: &Rational) -> Vec<&Modulus> {
        self.samples.iter().filter(|s| &s.eps == eps).map(|s| &s.delta).collect()
    }
}

/// Tabulates δ* over several domains and ε values. Domains are evaluated in
/// parallel; the output order does not depend on scheduling.
pub fn modulus_profile(
    cond: Condition,
    space: &MetricSpace,
    map: &SelfMap,
    domains: &[Domain],
    eps_list: &[Rational],
) -> Result<ModulusProfile> {
    if eps_list.is_empty() {
        return Err(Error::Argument("eps list is empty".into()));
    }
    if let Some(bad) = eps_list.iter().find(|e| !e.is_positive()) {
        return Err(Error::Argument(format!("ε = {bad} must be positive")));
    }
    let per_domain: Vec<(Vec<ModulusSample>, Option<ExcludedSet>)> = domains
        .par_iter()
        .map(|domain| {
            let data = Materialized::new(cond, space, map, domain)?;
            let outcomes = evaluate(cond, space, &data, eps_list)?;
            let samples = outcomes
                .into_iter()
                .map(|o| ModulusSample {
                    domain: domain.clone(),
                    depth: domain.depth(),
                    eps: o.eps,
                    delta: o.value,
                    violations: o.violations,
                    constraints: o.constraints,
                    eps_is_s0: o.eps_is_s0,
                })
                .collect();
            let excluded = (cond == Condition::KIII).then(|| {
                let mut values: Vec<Rational> = data.gaps.iter().skip(1).filter(|s| s.is_positive()).cloned().collect();
                values.sort();
                values.dedup();
                ExcludedSet { domain: domain.clone(), values }
            });
            Ok((samples, excluded))
        })
        .collect::<Result<_>>()?;
    let mut samples = Vec::new();
    let mut excluded_eps = Vec::new();
    for (s, e) in per_domain {
        samples.extend(s);
        excluded_eps.extend(e);
    }
    Ok(ModulusProfile { condition: cond, samples, excluded_eps })
}

/// Evaluates an ε–δ condition at the sampled ε values. K_III silently skips
/// samples in its excluded set.
pub fn check_condition(
    cond: Condition,
    space: &MetricSpace,
    map: &SelfMap,
    domain: &Domain,
    eps_list: &[Rational],
) -> Result<ConditionReport> {
    let data = Materialized::new(cond, space, map, domain)?;
    let usable: Vec<Rational> = eps_list
        .iter()
        .filter(|e| cond != Condition::KIII || check_eps(cond, &data, e).is_ok())
        .cloned()
        .collect();
    let outcomes = evaluate(cond, space, &data, &usable)?;
    let checked = outcomes.first().map_or(0, |o| o.constraints);
    let failure = outcomes.into_iter().find(|o| !o.value.is_positive());
    let eps_text: Vec<String> = usable.iter().map(ToString::to_string).collect();
    Ok(ConditionReport {
        condition: cond,
        verdict: if failure.is_some() { Verdict::FailsWithWitness } else { Verdict::HoldsOnTruncation },
        witness: failure.map(|o| Witness { constraint: o.witness.expect("non-positive modulus has a witness"), eps: Some(o.eps) }),
        truncation: format!("{domain} at eps {{{}}}", eps_text.join(", ")),
        checked,
        skipped: Vec::new(),
        certificate: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsDecision {
    pub condition: Condition,
    pub holds: bool,
    /// Number of critical ε values examined.
    pub candidates: usize,
    pub witness: Option<Witness>,
}

/// Decides "for every ε > 0 there is a δ > 0" on a finite constraint set.
///
/// δ*(ε) only changes where ε crosses a premise or conclusion value, so it is
/// enough to test every positive premise value and the midpoints between
/// consecutive distinct values (with 0 included). For K_III, candidates in
/// the excluded set are dropped; midpoints are never among the values, so
/// each open interval between values keeps an admissible sample.
pub fn decide_all_eps(cond: Condition, space: &MetricSpace, map: &SelfMap, domain: &Domain) -> Result<EpsDecision> {
    let data = Materialized::new(cond, space, map, domain)?;
    let mut values: BTreeSet<Rational> = BTreeSet::new();
    let mut premises: BTreeSet<Rational> = BTreeSet::new();
    values.insert(Rational::zero());
    data.visit(space, |_, _, premise, conclusion| {
        values.insert(premise.clone());
        values.insert(conclusion.clone());
        premises.insert(premise.clone());
    })?;
    let ordered: Vec<&Rational> = values.iter().collect();
    let mut candidates: BTreeSet<Rational> = premises.into_iter().filter(Rational::is_positive).collect();
    for w in ordered.windows(2) {
        candidates.insert((w[0] + w[1]).half());
    }
    let candidates: Vec<Rational> = candidates
        .into_iter()
        .filter(|e| cond != Condition::KIII || check_eps(cond, &data, e).is_ok())
        .collect();
    let outcomes = evaluate(cond, space, &data, &candidates)?;
    let failure = outcomes.into_iter().find(|o| !o.value.is_positive());
    Ok(EpsDecision {
        condition: cond,
        holds: failure.is_none(),
        candidates: candidates.len(),
        witness: failure.map(|o| Witness { constraint: o.witness.expect("non-positive modulus has a witness"), eps: Some(o.eps) }),
    })
}
