//! Acceptance run: one PASS/FAIL line per criterion, with its runtime budget.
//! Exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::checks::{antitone, lattice, scaling, Tally};
use common::oracle::{b1_brute_force, b1_two_pointer, cjm_k_l1};
use common::{eps_samples, gallery_cases, harmonic_sums, instance_case, r, random_instances, search_grid};
use fixlab::conditions::{
    check_kannan_constant, check_pointwise, kannan_equivalence_audit, modulus_at, CaseGaps, Condition, Domain, PairSet,
};
use fixlab::gallery::{self, GalleryId};
use fixlab::orbit::{cauchy_diagnostics, CauchyConfig, Evidence};
use fixlab::search::{find_separation, SearchConfig, SearchOutcome};
use fixlab::{picard_orbit, MetricSpace, Modulus, Point, Rational, SelfMap, Verdict};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn line(p: Rational) -> Point {
    Point::line(p)
}

fn halving_witness() -> Outcome {
    let g = gallery::build(GalleryId::Halving, 10).map_err(|e| e.to_string())?;
    let pairs = PairSet::Explicit(vec![(line(r(1, 1)), line(r(0, 1)))]);
    let report = check_pointwise(Condition::CmK, &g.space, &g.map, &pairs).map_err(|e| e.to_string())?;
    ensure(report.verdict == Verdict::FailsWithWitness, || format!("verdict {}", report.verdict))?;
    let w = report.witness.ok_or("no witness")?.constraint;
    // T1 = 1/2, T0 = 0: d(T1,T0) = 1/2 against ½(d(1,1/2) + d(0,0)) = 1/4
    let conclusion = (&r(1, 1) * &r(1, 2)).dist(&Rational::zero());
    let premise = (&r(1, 1).dist(&r(1, 2)) + &Rational::zero()).half();
    ensure(w.conclusion == conclusion && w.premise == premise && conclusion == r(1, 2) && premise == r(1, 4), || {
        format!("witness {} vs {}", w.conclusion, w.premise)
    })?;
    Ok(format!("d(T1,T0) = {} >= {}", w.conclusion, w.premise))
}

fn piecewise_witness() -> Outcome {
    let g = gallery::build(GalleryId::Piecewise, 10).map_err(|e| e.to_string())?;
    let (x, y) = (r(1, 2), r(51, 100));
    let report = check_pointwise(Condition::CmB, &g.space, &g.map, &PairSet::Explicit(vec![(line(x.clone()), line(y.clone()))]))
        .map_err(|e| e.to_string())?;
    ensure(report.verdict == Verdict::FailsWithWitness, || format!("verdict {}", report.verdict))?;
    let w = report.witness.ok_or("no witness")?.constraint;
    // 1/2 is on the 1/4 branch, 51/100 on the 1/5 branch
    let expected = (&x * &r(1, 4)).dist(&(&y * &r(1, 5)));
    ensure(expected == r(23, 1000) && w.conclusion == expected, || format!("conclusion {}", w.conclusion))?;
    ensure(w.premise == x.dist(&y) && w.premise == r(1, 100), || format!("premise {}", w.premise))?;
    let grid = g.space.points();
    ensure(grid.len() >= 1001, || format!("grid has {} points", grid.len()))?;
    let kannan = check_kannan_constant(&g.space, &g.map, &grid, &r(1, 3)).map_err(|e| e.to_string())?;
    ensure(kannan.holds, || format!("Kannan constant 1/3 fails at {:?}", kannan.witness))?;
    Ok(format!("{} > {}; Kannan 1/3 on {} pairs", w.conclusion, w.premise, kannan.pairs_checked))
}

fn l1_family() -> Outcome {
    let space = MetricSpace::kannan_l1(300);
    let map = SelfMap::L1Collapse;
    let cm_k = check_pointwise(Condition::CmK, &space, &map, &PairSet::All { cutoff: Some(300) }).map_err(|e| e.to_string())?;
    ensure(cm_k.holds(), || format!("CM_K fails: {:?}", cm_k.witness))?;

    let mut previous = Modulus::Infinite;
    let mut values = Vec::new();
    for n in [3u64, 10, 100] {
        let m = modulus_at(Condition::CjmK, &space, &map, &Domain::Cutoff(n), &r(2, 1)).map_err(|e| e.to_string())?;
        let closed = Modulus::Finite(&r(3, 2 * n as i64) + &r(3, 2 * (n as i64 - 1)));
        let brute = cjm_k_l1(n, &r(2, 1));
        ensure(m == closed && m == brute, || format!("N = {n}: {m}, closed form {closed}, brute force {brute}"))?;
        ensure(m < previous, || format!("not decreasing at N = {n}"))?;
        values.push(m.to_string());
        previous = m;
    }

    let eps = vec![r(1, 2), r(1, 1), r(2, 1)];
    for e in &eps {
        let m = modulus_at(Condition::KIV, &space, &map, &Domain::orbit(Point::x(1), 10), e).map_err(|e| e.to_string())?;
        ensure(m.is_positive(), || format!("K_IV at {e} is {m}"))?;
    }
    let audit = kannan_equivalence_audit(&space, &map, &Point::x(1), 10, &eps).map_err(|e| e.to_string())?;
    // x_1 -> u_1 -> 0 with gaps 5, 2: δ₁ = min(5/2 - d(u_1, 0), 1 - 0)
    let d1 = std::cmp::min(&r(5, 2) - &space.distance(&Point::u(1), &Point::zero()).unwrap(), r(1, 1));
    match &audit.case_gaps {
        CaseGaps::Computed { delta1, .. } if *delta1 == d1 && d1 == r(1, 2) => {}
        other => return Err(format!("case gaps {other:?}")),
    }
    Ok(format!("CM_K on {} pairs; CJM_K(2) = {}; delta1 = {d1}", cm_k.checked, values.join(", ")))
}

fn harmonic_family() -> Outcome {
    let space = MetricSpace::harmonic(1000, 1002).map_err(|e| e.to_string())?;
    let map = SelfMap::Shift;
    let cm_b = check_pointwise(Condition::CmB, &space, &map, &PairSet::All { cutoff: Some(500) }).map_err(|e| e.to_string())?;
    ensure(cm_b.holds(), || format!("CM_B fails: {:?}", cm_b.witness))?;

    let orbit = picard_orbit(&space, &map, &Point::a(0), 1001).map_err(|e| e.to_string())?;
    for n in 0..=1000usize {
        ensure(orbit.gaps[n] == Rational::reciprocal_of(n as u64 + 1), || format!("s_{n} = {}", orbit.gaps[n]))?;
    }

    let h = harmonic_sums(1001);
    let gaps: Vec<Rational> = h.windows(2).map(|w| &w[1] - &w[0]).collect();
    let third = r(1, 3);
    let b2_oracle = (0..999)
        .filter(|&i| gaps[i + 1] > third)
        .map(|i| &gaps[i] - &third)
        .min()
        .map_or(Modulus::Infinite, Modulus::Finite);
    let b2 = modulus_at(Condition::B2, &space, &map, &Domain::orbit(Point::a(0), 1000), &third).map_err(|e| e.to_string())?;
    ensure(b2 == b2_oracle && b2 == Modulus::Finite(r(2, 3)), || format!("B2(1/3) = {b2}, oracle {b2_oracle}"))?;

    let one = r(1, 1);
    let b1_100 = modulus_at(Condition::B1, &space, &map, &Domain::orbit(Point::a(0), 100), &one).map_err(|e| e.to_string())?;
    let b1_1000 = modulus_at(Condition::B1, &space, &map, &Domain::orbit(Point::a(0), 1000), &one).map_err(|e| e.to_string())?;
    ensure(b1_100 == b1_brute_force(100, &one), || format!("B1 at N = 100: {b1_100}"))?;
    ensure(b1_1000 == b1_two_pointer(1000, &one), || format!("B1 at N = 1000: {b1_1000}"))?;
    ensure(b1_1000.is_positive() && b1_1000 < b1_100, || format!("B1: {b1_100} then {b1_1000}"))?;
    ensure(b1_1000 < Modulus::Finite(r(1, 100)), || format!("B1 at N = 1000 is {b1_1000}"))?;
    Ok(format!(
        "B2(1/3) = {b2}; B1(1) ~ {} then ~ {}",
        b1_100.to_decimal(6),
        b1_1000.to_decimal(6)
    ))
}

fn cauchy_discrimination() -> Outcome {
    let space = MetricSpace::harmonic(5000, 5001).map_err(|e| e.to_string())?;
    let orbit = picard_orbit(&space, &SelfMap::Shift, &Point::a(0), 5000).map_err(|e| e.to_string())?;
    let config = CauchyConfig { p_max: 10, tail_start: 500, threshold: Rational::reciprocal_of(501), bound: r(1, 1) };
    let report = cauchy_diagnostics(&space, &orbit, config).map_err(|e| e.to_string())?;
    let h = harmonic_sums(5001);
    for w in &report.windows {
        // H_{n+p} - H_n decreases in n, so the tail maximum sits at n = 500
        let expected = &h[500 + w.p] - &h[500];
        ensure(w.max == expected && w.max <= &Rational::integer(w.p as u64) * &Rational::reciprocal_of(501), || {
            format!("window {}: {}", w.p, w.max)
        })?;
    }
    ensure(report.g_cauchy == Evidence::EvidenceFor, || format!("G-Cauchy {:?}", report.g_cauchy))?;
    ensure(report.cauchy == Evidence::EvidenceAgainst, || format!("Cauchy {:?}", report.cauchy))?;
    let w = report.spread_witness.ok_or("no Cauchy witness")?;
    ensure(w.distance == &h[w.j] - &h[w.i] && w.distance > r(2, 1), || format!("witness distance {}", w.distance))?;
    Ok(format!("G-Cauchy for, Cauchy against: d({}, {}) ~ {}", w.p, w.q, w.distance.to_decimal(4)))
}

fn report(t: Tally, what: &str) -> Outcome {
    match t.violations.first() {
        None => Ok(format!("{} {what} comparisons, 0 violations", t.compared)),
        Some(v) => Err(format!("{} violations, first: {v}", t.violations.len())),
    }
}

fn lattice_suite() -> Outcome {
    let eps = eps_samples();
    let mut t = Tally::default();
    for case in gallery_cases() {
        t.absorb(lattice(&case, &eps));
        let mut case = case;
        case.points.truncate(24);
        t.absorb(antitone(&case, &eps[..3]));
    }
    for inst in random_instances(100, 7, 5) {
        let case = instance_case(&inst);
        t.absorb(lattice(&case, &eps));
        t.absorb(antitone(&case, &eps));
    }
    report(t, "exact")
}

fn exhaustion() -> Outcome {
    let config = SearchConfig::exhaustive(4, search_grid());
    let mut notes = Vec::new();
    for (hold, fail) in [(Condition::CmB, Condition::B1), (Condition::CmK, Condition::KIV)] {
        match find_separation(&[hold], &[fail], &config).map_err(|e| e.to_string())? {
            SearchOutcome::Exhausted(cert) => notes.push(format!("{hold}/{fail}: {} covered", cert.instances_covered)),
            other => return Err(format!("{hold} without {fail}: {other:?}")),
        }
    }
    for (hold, fail) in [(Condition::CmB, Condition::CmK), (Condition::CmK, Condition::CmB)] {
        let outcome = find_separation(&[hold], &[fail], &config).map_err(|e| e.to_string())?;
        let w = outcome.witness().ok_or_else(|| format!("no witness for {hold} without {fail}"))?;
        ensure(w.confirmed, || format!("unconfirmed witness for {hold} without {fail}"))?;
        notes.push(format!("{hold}/{fail}: witness on {} points", w.instance.points()));
    }
    Ok(notes.join("; "))
}

fn scaling_suite() -> Outcome {
    let mut t = Tally::default();
    for case in gallery_cases() {
        t.absorb(scaling(&case, &r(3, 2), &eps_samples()));
    }
    report(t, "scaled")
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 8] = [
        ("1 HALVING: CM_K fails at (1, 0)", 1, halving_witness),
        ("2 PIECEWISE: CM_B fails at (1/2, 51/100), Kannan 1/3", 30, piecewise_witness),
        ("3 KANNAN_L1: CM_K, CJM_K modulus, K_IV on x_1", 60, l1_family),
        ("4 HARMONIC: CM_B, gaps, B2 and B1 moduli", 120, harmonic_family),
        ("5 HARMONIC: G-Cauchy without Cauchy", 120, cauchy_discrimination),
        ("6 implication lattice and truncation", 600, lattice_suite),
        ("7 exhaustive separation search", 600, exhaustion),
        ("8 scaling by 3/2", 600, scaling_suite),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = started.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > Duration::from_secs(budget) => Err(format!("over the {budget} s budget")),
            other => other,
        };
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!("{status} [{name}] {:.2}s (limit {budget}s): {detail}", elapsed.as_secs_f64());
    }
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
