//! The condition catalog and exact ε–δ moduli.
//!
//! Every ε–δ condition in the catalog has the shape
//!
//! ```text
//! premise < ε + δ   ⟹   conclusion ≤ ε      for every constraint
//! ```
//!
//! over a set of constraints (pairs of points, or pairs of orbit indices).
//! On a finite constraint set the largest admissible δ is
//!
//! ```text
//! δ*(ε) = min { premise − ε : conclusion > ε }      (+∞ if no conclusion exceeds ε)
//! ```
//!
//! and the condition holds at ε exactly when `δ*(ε) > 0`.

mod audit;
mod modulus;
mod pointwise;
mod stream;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::scalar::Rational;
use crate::space::Point;

pub use audit::{kannan_equivalence_audit, AuditReport, Assertion, CaseGaps};
pub use modulus::{
    check_condition, decide_all_eps, default_eps, modulus_at, modulus_detail, modulus_profile, EpsDecision,
    ModulusOutcome, ModulusProfile, ModulusSample,
};
pub use pointwise::{check_kannan_constant, check_pointwise, KannanConstantReport, PairSet};
pub use stream::constraint_stream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    /// `x ≠ y ⟹ d(Tx,Ty) < d(x,y)`.
    CmB,
    /// `x ≠ y ⟹ d(Tx,Ty) < ½{d(x,Tx) + d(y,Ty)}`.
    CmK,
    /// `d(x,y) < ε + δ ⟹ d(Tx,Ty) ≤ ε` over all pairs.
    CjmB,
    /// `½{d(x,Tx) + d(y,Ty)} < ε + δ ⟹ d(Tx,Ty) ≤ ε` over all pairs.
    CjmK,
    /// `d(Tⁱx,Tʲx) < ε + δ ⟹ d(Tⁱ⁺¹x,Tʲ⁺¹x) ≤ ε` over orbit index pairs.
    B1,
    /// `s_i < ε + δ ⟹ s_{i+1} ≤ ε` along the orbit.
    B2,
    /// `½{s_i + s_{i+1}} < ε + δ ⟹ s_{i+1} ≤ ε` along the orbit.
    KII,
    /// As [`Condition::KIV`], for ε outside `{s_k : k ≥ 1}`.
    KIII,
    /// `½{s_i + s_j} < ε + δ ⟹ d(Tⁱ⁺¹x,Tʲ⁺¹x) ≤ ε` over orbit index pairs.
    KIV,
}

impl Condition {
    pub const ALL: [Condition; 9] = [
        Condition::CmB,
        Condition::CmK,
        Condition::CjmB,
        Condition::CjmK,
        Condition::B1,
        Condition::B2,
        Condition::KII,
        Condition::KIII,
        Condition::KIV,
    ];

    /// The conditions that carry an ε–δ modulus.
    pub const EPS_DELTA: [Condition; 7] = [
        Condition::CjmB,
        Condition::CjmK,
        Condition::B1,
        Condition::B2,
        Condition::KII,
        Condition::KIII,
        Condition::KIV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::CmB => "CM_B",
            Condition::CmK => "CM_K",
            Condition::CjmB => "CJM_B",
            Condition::CjmK => "CJM_K",
            Condition::B1 => "B1",
            Condition::B2 => "B2",
            Condition::KII => "K_II",
            Condition::KIII => "K_III",
            Condition::KIV => "K_IV",
        }
    }

    pub fn is_pointwise(self) -> bool {
        matches!(self, Condition::CmB | Condition::CmK)
    }

    pub fn is_pairwise(self) -> bool {
        matches!(self, Condition::CjmB | Condition::CjmK)
    }

    pub fn is_orbitwise(self) -> bool {
        !self.is_pointwise() && !self.is_pairwise()
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let key: String = s.trim().chars().filter(|c| *c != '_' && *c != '-').collect::<String>().to_ascii_uppercase();
        Ok(match key.as_str() {
            "CMB" => Condition::CmB,
            "CMK" => Condition::CmK,
            "CJMB" => Condition::CjmB,
            "CJMK" => Condition::CjmK,
            "B1" => Condition::B1,
            "B2" => Condition::B2,
            "KII" => Condition::KII,
            "KIII" => Condition::KIII,
            "KIV" => Condition::KIV,
            _ => return Err(Error::Parse(format!("unknown condition {s:?}"))),
        })
    }
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// The finite constraint domain a condition is evaluated on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    /// The orbit prefix `T⁰x..Tᴺx` of `start`.
    Orbit { start: Point, prefix: usize },
    /// All points enumerated at a cutoff.
    Cutoff(u64),
    /// An explicit point set.
    Points(Vec<Point>),
}

impl Domain {
    pub fn orbit(start: Point, prefix: usize) -> Domain {
        Domain::Orbit { start, prefix }
    }

    /// Truncation depth: the orbit prefix or the cutoff.
    pub fn depth(&self) -> u64 {
        match self {
            Domain::Orbit { prefix, .. } => *prefix as u64,
            Domain::Cutoff(n) => *n,
            Domain::Points(points) => points.len() as u64,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Orbit { start, prefix } => write!(f, "orbit({start};N={prefix})"),
            Domain::Cutoff(n) => write!(f, "pairs(cutoff={n})"),
            Domain::Points(points) => write!(f, "pairs(points={})", points.len()),
        }
    }
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One quantified instance of a condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintInstance {
    /// Orbit indices, or positions in the enumerated point list.
    pub i: usize,
    pub j: usize,
    pub p: Point,
    pub q: Point,
    /// The left-hand quantity, e.g. `d(Tⁱx,Tʲx)` or `½{s_i + s_j}`.
    pub premise: Rational,
    /// The right-hand quantity, e.g. `d(Tⁱ⁺¹x,Tʲ⁺¹x)`.
    pub conclusion: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    HoldsOnTruncation,
    FailsWithWitness,
    HoldsWithCertificate,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self != Verdict::FailsWithWitness
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::HoldsOnTruncation => "holds-on-truncation",
            Verdict::FailsWithWitness => "fails-with-witness",
            Verdict::HoldsWithCertificate => "holds-with-certificate",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub constraint: ConstraintInstance,
    /// The ε at which an ε–δ condition fails; absent for pointwise conditions.
    pub eps: Option<Rational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub truncation: String,
    pub checked: usize,
    /// Pairs with equal points, which pointwise conditions do not constrain.
    pub skipped: Vec<(Point, Point)>,
    pub certificate: Option<String>,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}
