//! The space/map definition file.
//!
//! A JSON document with a `kind` tag, the space data and a `map` object.
//! Every rational is a `"p/q"` string.
//!
//! ```json
//! {"kind": "finite", "points": 2, "distances": [["0/1", "1/1"], ["1/1", "0/1"]],
//!  "map": {"rule": "table", "table": [0, 0]}}
//! {"kind": "parametric", "family": "kannan_l1", "coefficients": ["3/1", "4/1", "1/1", "1/1"],
//!  "scale": "1/1", "cutoff": 10, "capacity": 4294967295, "map": {"rule": "l1_collapse"}}
//! {"kind": "line", "lo": "0/1", "hi": "1/1", "scale": "1/1", "cutoff": 10,
//!  "extra_points": ["1/2"], "map": {"rule": "linear", "factor": "1/2"}}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::scalar::Rational;
use crate::space::{Family, FamilyId, MetricSpace, SpaceKind, TwoRay};

fn one() -> Rational {
    Rational::one()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceDef {
    Finite {
        points: usize,
        distances: Vec<Vec<Rational>>,
    },
    Parametric {
        family: FamilyId,
        #[serde(default)]
        coefficients: Vec<Rational>,
        #[serde(default = "one")]
        scale: Rational,
        cutoff: u64,
        #[serde(default)]
        capacity: Option<u64>,
    },
    Line {
        lo: Rational,
        hi: Rational,
        #[serde(default = "one")]
        scale: Rational,
        cutoff: u64,
        #[serde(default)]
        extra_points: Vec<Rational>,
    },
}

impl From<&MetricSpace> for SpaceDef {
    fn from(space: &MetricSpace) -> Self {
        match space.kind() {
            SpaceKind::Finite(_) => {
                let matrix = space.matrix().expect("finite").to_vec();
                SpaceDef::Finite { points: matrix.len(), distances: matrix }
            }
            SpaceKind::Family(f) => {
                let (family, coefficients) = match f.family() {
                    Family::KannanL1(r) => (
                        FamilyId::KannanL1,
                        vec![r.x_base.clone(), r.x_slope.clone(), r.u_base.clone(), r.u_slope.clone()],
                    ),
                    Family::Harmonic(_) => (FamilyId::Harmonic, Vec::new()),
                };
                SpaceDef::Parametric {
                    family,
                    coefficients,
                    scale: f.scale().clone(),
                    cutoff: f.cutoff(),
                    capacity: Some(f.capacity()),
                }
            }
            SpaceKind::Line(l) => SpaceDef::Line {
                lo: l.lo().clone(),
                hi: l.hi().clone(),
                scale: l.scale().clone(),
                cutoff: l.cutoff(),
                extra_points: l.extra().to_vec(),
            },
        }
    }
}

impl TryFrom<SpaceDef> for MetricSpace {
    type Error = Error;

    fn try_from(def: SpaceDef) -> Result<Self> {
        let (space, scale) = match def {
            SpaceDef::Finite { points, distances } => {
                if points != distances.len() {
                    return Err(Error::InvalidSpace(format!(
                        "points = {points} but the matrix has {} rows",
                        distances.len()
                    )));
                }
                let space = MetricSpace::finite(distances)?;
                // The other kinds embed in ℓ1 or the line; a matrix can be anything.
                if let Some((p, q, r)) = space.verify_triangle(points as u64)?.violation {
                    return Err(Error::InvalidSpace(format!("triangle inequality fails: d({p},{r}) > d({p},{q}) + d({q},{r})")));
                }
                (space, Rational::one())
            }
            SpaceDef::Parametric { family: FamilyId::KannanL1, coefficients, scale, cutoff, capacity } => {
                let [x_base, x_slope, u_base, u_slope]: [Rational; 4] = coefficients
                    .try_into()
                    .map_err(|_| Error::InvalidSpace("kannan_l1 takes four coefficients".into()))?;
                let rays = TwoRay { x_base, x_slope, u_base, u_slope };
                let capacity = capacity.unwrap_or(crate::space::L1_DEFAULT_CAPACITY);
                (MetricSpace::two_ray(rays, cutoff, capacity)?, scale)
            }
            SpaceDef::Parametric { family: FamilyId::Harmonic, coefficients, scale, cutoff, capacity } => {
                if !coefficients.is_empty() {
                    return Err(Error::InvalidSpace("harmonic takes no coefficients".into()));
                }
                (MetricSpace::harmonic(cutoff, capacity.unwrap_or(cutoff + 1))?, scale)
            }
            SpaceDef::Line { lo, hi, scale, cutoff, extra_points } => {
                (MetricSpace::line(lo, hi, cutoff, extra_points)?, scale)
            }
        };
        if scale.is_one() {
            Ok(space)
        } else {
            space.scaled(&scale)
        }
    }
}

/// A space together with its self-map, as stored in a definition file.
#[derive(Clone, Debug)]
pub struct Definition {
    pub space: MetricSpace,
    pub map: SelfMap,
}

#[derive(Serialize, Deserialize)]
struct DefinitionFile {
    #[serde(flatten)]
    space: SpaceDef,
    map: SelfMap,
}

impl Definition {
    pub fn new(space: MetricSpace, map: SelfMap) -> Self {
        Definition { space, map }
    }

    pub fn to_json(&self) -> String {
        let file = DefinitionFile { space: SpaceDef::from(&self.space), map: self.map.clone() };
        serde_json::to_string_pretty(&file).expect("definition serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DefinitionFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("definition file: {e}")))?;
        let space = MetricSpace::try_from(file.space)?;
        if let SelfMap::Table { table } = &file.map {
            let n = space.finite_len().unwrap_or(0);
            if table.len() != n || table.iter().any(|&t| t >= n) {
                return Err(Error::InvalidSpace("map table does not match the finite space".into()));
            }
        }
        Ok(Definition { space, map: file.map })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Point;

    #[test]
    fn finite_round_trip() {
        let text = r#"{"kind": "finite", "points": 2, "distances": [["0", "1/2"], ["0.5", "0"]],
                       "map": {"rule": "table", "table": [0, 0]}}"#;
        let def = Definition::from_json(text).unwrap();
        assert_eq!(def.space.distance(&Point::Index(0), &Point::Index(1)).unwrap(), Rational::ratio(1, 2));
        let again = Definition::from_json(&def.to_json()).unwrap();
        assert_eq!(again.to_json(), def.to_json());
        assert!(def.to_json().contains("\"1/2\""));
    }

    #[test]
    fn parametric_round_trip_keeps_scale() {
        let space = MetricSpace::kannan_l1(4).scaled(&Rational::ratio(3, 2)).unwrap();
        let def = Definition::new(space, SelfMap::L1Collapse);
        let back = Definition::from_json(&def.to_json()).unwrap();
        assert_eq!(
            back.space.distance(&Point::u(1), &Point::u(2)).unwrap(),
            Rational::ratio(21, 4)
        );
        assert_eq!(back.space.points().len(), 9);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(Definition::from_json("{}").is_err());
        let no_triangle = r#"{"kind": "finite", "points": 3, "distances": [["0", "1", "5"], ["1", "0", "1"], ["5", "1", "0"]],
                              "map": {"rule": "identity"}}"#;
        assert!(Definition::from_json(no_triangle).is_err());
        let bad_table = r#"{"kind": "finite", "points": 2, "distances": [["0", "1"], ["1", "0"]],
                            "map": {"rule": "table", "table": [0, 2]}}"#;
        assert!(Definition::from_json(bad_table).is_err());
        let asym = r#"{"kind": "finite", "points": 2, "distances": [["0", "1"], ["2", "0"]],
                       "map": {"rule": "identity"}}"#;
        assert!(Definition::from_json(asym).is_err());
        let coeffs = r#"{"kind": "parametric", "family": "kannan_l1", "coefficients": ["1"], "cutoff": 3,
                         "map": {"rule": "l1_collapse"}}"#;
        assert!(Definition::from_json(coeffs).is_err());
    }

    #[test]
    fn line_file() {
        let text = r#"{"kind": "line", "lo": "0", "hi": "1", "cutoff": 4, "extra_points": ["0.51"],
                       "map": {"rule": "piecewise_linear", "breakpoint": "1/2", "left": "1/4", "right": "1/5"}}"#;
        let def = Definition::from_json(text).unwrap();
        assert_eq!(def.space.points().len(), 6);
    }
}
