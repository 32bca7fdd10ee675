//! Exact verification of Banach- and Kannan-type fixed-point conditions.
//!
//! Metric spaces and self-maps are represented exactly (finite distance
//! matrices, closed-form parametric families, rational grids on an interval),
//! Picard orbits are iterated with rational arithmetic, and every ε–δ
//! condition of the catalog is reduced to an exact modulus: the minimum of
//! `premise - ε` over the constraints whose conclusion exceeds `ε`.

pub mod conditions;
pub mod definition;
pub mod error;
pub mod gallery;
pub mod map;
pub mod orbit;
pub mod scalar;
pub mod search;
pub mod space;

pub use conditions::{Condition, ConditionReport, Domain, Verdict};
pub use definition::Definition;
pub use error::{Error, Result};
pub use map::SelfMap;
pub use orbit::{OrbitRecord, picard_orbit};
pub use scalar::{Modulus, Rational};
pub use space::{MetricSpace, Point};
