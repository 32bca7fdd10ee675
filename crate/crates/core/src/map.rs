//! Self-maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::space::{MetricSpace, Point, Symbol};

/// A self-map given by one of a fixed set of exact rules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SelfMap {
    Identity,
    /// `i ↦ table[i]` on a finite space.
    Table { table: Vec<usize> },
    /// `x_n ↦ u_n`, `u_n ↦ 0`, `0 ↦ 0`.
    L1Collapse,
    /// `a_n ↦ a_{n+1}`; raises the parameter by one.
    Shift,
    /// `x ↦ factor · x` on the line.
    Linear { factor: Rational },
    /// `x ↦ left · x` for `x ≤ breakpoint`, `x ↦ right · x` otherwise.
    PiecewiseLinear { breakpoint: Rational, left: Rational, right: Rational },
}

impl SelfMap {
    /// `T(p)`, with no reference to a particular space.
    pub fn apply(&self, p: &Point) -> Result<Point> {
        let outside = || Error::Domain(format!("{p} is outside the domain of the {} rule", self.rule_name()));
        match (self, p) {
            (SelfMap::Identity, _) => Ok(p.clone()),
            (SelfMap::Table { table }, Point::Index(i)) => table.get(*i).map(|j| Point::Index(*j)).ok_or_else(outside),
            (SelfMap::L1Collapse, Point::Param { symbol, n }) => match symbol {
                Symbol::X if *n >= 1 => Ok(Point::u(*n)),
                Symbol::U if *n >= 1 => Ok(Point::zero()),
                Symbol::Zero => Ok(Point::zero()),
                _ => Err(outside()),
            },
            (SelfMap::Shift, Point::Param { symbol: Symbol::A, n }) => n
                .checked_add(1)
                .map(Point::a)
                .ok_or_else(|| Error::Capacity(format!("parameter overflow shifting {p}"))),
            (SelfMap::Linear { factor }, Point::Line(x)) => Ok(Point::Line(factor * x)),
            (SelfMap::PiecewiseLinear { breakpoint, left, right }, Point::Line(x)) => {
                let factor = if x <= breakpoint { left } else { right };
                Ok(Point::Line(factor * x))
            }
            _ => Err(outside()),
        }
    }

    /// `T(p)` for `p` in `space`, failing if the image leaves the space (a
    /// capacity error for parametric families).
    pub fn apply_in(&self, space: &MetricSpace, p: &Point) -> Result<Point> {
        space.check(p)?;
        let image = self.apply(p)?;
        match space.check(&image) {
            Ok(()) => Ok(image),
            Err(Error::Capacity(msg)) => Err(Error::Capacity(format!("T({p}) = {image}: {msg}"))),
            Err(_) => Err(Error::Domain(format!("T({p}) = {image} leaves the space"))),
        }
    }

    pub fn rule_name(&self) -> &'static str {
        match self {
            SelfMap::Identity => "identity",
            SelfMap::Table { .. } => "table",
            SelfMap::L1Collapse => "l1_collapse",
            SelfMap::Shift => "shift",
            SelfMap::Linear { .. } => "linear",
            SelfMap::PiecewiseLinear { .. } => "piecewise_linear",
        }
    }

    /// Relabels a table map through the permutation `perm` (new index of old point `i` is `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<SelfMap> {
        match self {
            SelfMap::Table { table } => {
                if perm.len() != table.len() {
                    return Err(Error::Argument("permutation length mismatch".into()));
                }
                let mut out = vec![0; table.len()];
                for (i, &t) in table.iter().enumerate() {
                    out[perm[i]] = perm[t];
                }
                Ok(SelfMap::Table { table: out })
            }
            SelfMap::Identity => Ok(SelfMap::Identity),
            _ => Err(Error::Argument("only table maps can be relabelled".into())),
        }
    }
}
