//! Exact comparisons shared by the property and acceptance suites. Each
//! returns the list of violations so callers can either assert or report.

use fixlab::conditions::{modulus_at, Condition, Domain};
use fixlab::{Error, Modulus, Rational};

use super::{orbit_points, Case};

pub const ORBIT: [Condition; 5] = [Condition::B1, Condition::B2, Condition::KII, Condition::KIII, Condition::KIV];

/// δ*(ε), or `None` where K_III excludes ε.
pub fn modulus(cond: Condition, case: &Case, domain: &Domain, eps: &Rational) -> Option<Modulus> {
    match modulus_at(cond, &case.space, &case.map, domain, eps) {
        Ok(m) => Some(m),
        Err(Error::Argument(msg)) if cond == Condition::KIII && msg.contains("excluded") => None,
        Err(e) => panic!("{}: {cond} on {domain} at {eps}: {e}", case.name),
    }
}

fn prefixes(case: &Case) -> Vec<usize> {
    let mut out = vec![1, 2, 3, case.max_prefix / 2, case.max_prefix];
    out.sort_unstable();
    out.dedup();
    out.retain(|&n| n >= 1);
    out
}

/// Counts of comparisons made and the violations found.
#[derive(Default)]
pub struct Tally {
    pub compared: usize,
    pub violations: Vec<String>,
}

impl Tally {
    fn le(&mut self, a: &Modulus, b: &Modulus, what: impl FnOnce() -> String) {
        self.compared += 1;
        if a > b {
            self.violations.push(format!("{}: {a} > {b}", what()));
        }
    }

    pub fn absorb(&mut self, other: Tally) {
        self.compared += other.compared;
        self.violations.extend(other.violations);
    }
}

/// B1 ≤ B2, K_IV ≤ K_II, K_IV ≤ K_III (admissible ε), and the pair
/// conditions over points containing the orbit below the orbit conditions.
pub fn lattice(case: &Case, eps_list: &[Rational]) -> Tally {
    let mut t = Tally::default();
    for start in &case.starts {
        for n in prefixes(case) {
            let orbit = Domain::orbit(start.clone(), n);
            let mut pts = case.points.clone();
            pts.extend(orbit_points(&case.map, start, n));
            let pairs = Domain::Points(pts);
            for eps in eps_list {
                let at = || format!("{} from {start}, N = {n}, eps = {eps}", case.name);
                let m = |c| modulus(c, case, &orbit, eps);
                let (b1, b2, kii, kiv) = (m(Condition::B1).unwrap(), m(Condition::B2).unwrap(), m(Condition::KII).unwrap(), m(Condition::KIV).unwrap());
                t.le(&b1, &b2, || format!("B1 vs B2 at {}", at()));
                t.le(&kiv, &kii, || format!("K_IV vs K_II at {}", at()));
                if let Some(kiii) = m(Condition::KIII) {
                    t.le(&kiv, &kiii, || format!("K_IV vs K_III at {}", at()));
                }
                let cjm_b = modulus(Condition::CjmB, case, &pairs, eps).unwrap();
                let cjm_k = modulus(Condition::CjmK, case, &pairs, eps).unwrap();
                t.le(&cjm_b, &b1, || format!("CJM_B vs B1 at {}", at()));
                t.le(&cjm_k, &kiv, || format!("CJM_K vs K_IV at {}", at()));
            }
        }
    }
    t
}

/// Nested domains give non-increasing moduli: longer orbit prefixes, and
/// point sets grown one point at a time.
pub fn antitone(case: &Case, eps_list: &[Rational]) -> Tally {
    let mut t = Tally::default();
    for start in &case.starts {
        for eps in eps_list {
            for cond in ORBIT {
                let values: Vec<Option<Modulus>> =
                    (1..=case.max_prefix).map(|n| modulus(cond, case, &Domain::orbit(start.clone(), n), eps)).collect();
                for (n, w) in values.windows(2).enumerate() {
                    if let (Some(a), Some(b)) = (&w[0], &w[1]) {
                        t.le(b, a, || format!("{}: {cond} from {start} at {eps}, N = {} to {}", case.name, n + 1, n + 2));
                    }
                }
            }
        }
    }
    for eps in eps_list {
        for cond in [Condition::CjmB, Condition::CjmK] {
            let mut previous: Option<Modulus> = None;
            for k in 1..=case.points.len() {
                let m = modulus(cond, case, &Domain::Points(case.points[..k].to_vec()), eps).unwrap();
                if let Some(p) = &previous {
                    t.le(&m, p, || format!("{}: {cond} at {eps} adding point {}", case.name, case.points[k - 1]));
                }
                previous = Some(m);
            }
        }
    }
    t
}

/// `modulus_{c·d}(cond, c·ε) = c · modulus_d(cond, ε)` on every orbit and on
/// the case's point set.
pub fn scaling(case: &Case, c: &Rational, eps_list: &[Rational]) -> Tally {
    let mut t = Tally::default();
    let scaled = case.space.scaled(c).unwrap();
    let mut check = |cond: Condition, domain: &Domain, eps: &Rational| {
        let base = modulus_at(cond, &case.space, &case.map, domain, eps);
        let up = modulus_at(cond, &scaled, &case.map, domain, &(c * eps));
        t.compared += 1;
        match (base, up) {
            (Ok(a), Ok(b)) if b == a.scale(c) => {}
            (Err(_), Err(_)) if cond == Condition::KIII => {}
            (a, b) => t.violations.push(format!("{}: {cond} on {domain} at {eps}: {a:?} scaled vs {b:?}", case.name)),
        }
    };
    for eps in eps_list {
        for start in &case.starts {
            let domain = Domain::orbit(start.clone(), case.max_prefix);
            for cond in ORBIT {
                check(cond, &domain, eps);
            }
        }
        for cond in [Condition::CjmB, Condition::CjmK] {
            check(cond, &Domain::Points(case.points.clone()), eps);
        }
    }
    t
}
