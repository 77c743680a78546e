//! Certifiers and falsifiers for expanding, (★), ball expanding, openness,
//! local injectivity and positive expansivity, plus the Schwarzian
//! derivative and ε-net test for preimages of the critical set.
//!
//! Verdicts are three-valued. A falsification always carries a counterexample
//! that [`ExpansivityVerdict::revalidate`] re-checks by direct evaluation.

mod balls;
mod crosscheck;
mod local;
mod nets;
mod pairs;
mod polygon;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::numerics::{
    format_rational, int, opt_rational_serde, Interval, Rational, RationalIntervalSet,
};
use crate::systems::{format_point, Point, SystemError, SystemSpec};

pub use balls::{cantor_origin_image, cantor_truncated_segment, check_ball_expanding};
pub use crosscheck::{
    find_ball_constants, find_star_constants, theorem25_crosscheck, Agreement, CrosscheckReport,
    SideReport,
};
pub use local::{
    check_locally_injective, check_open_at, check_open_on, positively_expansive_falsify,
    shift_positively_expansive,
};
pub use nets::{eps_net_check, eps_net_check_capped, schwarzian, NetReport, DEFAULT_NET_CAP};
pub use pairs::{check_expanding, check_star};

#[derive(Debug, Error)]
pub enum ExpansivityError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("operation not supported for {0} systems")]
    Unsupported(&'static str),
    #[error("{0} is a critical point")]
    CriticalPoint(String),
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Property {
    Expanding,
    Star,
    BallExpanding,
    OpenOn,
    LocallyInjective,
    PositivelyExpansive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Holds {
    Certified,
    Falsified,
    Undetermined,
}

impl std::fmt::Display for Holds {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Holds::Certified => "certified",
            Holds::Falsified => "falsified",
            Holds::Undetermined => "undetermined",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Constants {
    #[serde(with = "opt_rational_serde")]
    pub delta: Option<Rational>,
    #[serde(with = "opt_rational_serde")]
    pub mu: Option<Rational>,
    #[serde(with = "opt_rational_serde")]
    pub nu: Option<Rational>,
    #[serde(with = "opt_rational_serde")]
    pub b: Option<Rational>,
}

/// A violating configuration.
///
/// * expanding, (★): the pair `x, y`; `quantity` is `|f(x) - f(y)| / |x - y|`.
/// * ball expanding: centre `x`, radius `radius`, and a point `y` of
///   `B̄_{με}(f(x))` missed by `f(B̄_ε(x))`; `quantity` is its distance to the image.
/// * open: `x` and the radius of a ball whose image does not surround `f(x)`;
///   `y = f(x)`.
/// * locally injective: `x != y` with `f(x) = f(y)`, both within `radius`
///   of a critical point.
/// * positively expansive: `x != y`; `quantity` is the largest distance
///   between their orbits up to `horizon`.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub x: Point,
    pub y: Point,
    pub radius: Option<Rational>,
    pub horizon: Option<usize>,
    pub quantity: Rational,
    pub inequality: String,
}

impl Counterexample {
    fn to_json(&self) -> Value {
        json!({
            "x": format_point(&self.x),
            "y": format_point(&self.y),
            "radius": self.radius.as_ref().map(format_rational),
            "horizon": self.horizon,
            "quantity": format_rational(&self.quantity),
            "inequality": self.inequality,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansivityVerdict {
    pub property: Property,
    pub holds: Holds,
    pub constants: Constants,
    pub counterexample: Option<Counterexample>,
    /// Short account of how the verdict was reached.
    pub method: String,
}

impl ExpansivityVerdict {
    fn certified(property: Property, constants: Constants, method: &str) -> Self {
        Self { property, holds: Holds::Certified, constants, counterexample: None, method: method.into() }
    }

    fn falsified(property: Property, constants: Constants, cex: Counterexample, method: &str) -> Self {
        Self {
            property,
            holds: Holds::Falsified,
            constants,
            counterexample: Some(cex),
            method: method.into(),
        }
    }

    fn undetermined(property: Property, constants: Constants, method: &str) -> Self {
        Self { property, holds: Holds::Undetermined, constants, counterexample: None, method: method.into() }
    }

    pub fn is_certified(&self) -> bool {
        self.holds == Holds::Certified
    }

    pub fn is_falsified(&self) -> bool {
        self.holds == Holds::Falsified
    }

    /// Re-checks the counterexample of a falsified verdict by direct
    /// evaluation. Verdicts without a counterexample pass trivially.
    pub fn revalidate(&self, system: &SystemSpec) -> bool {
        let Some(cex) = &self.counterexample else { return self.holds != Holds::Falsified };
        local::revalidate(system, self.property, &self.constants, cex).unwrap_or(false)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "property": self.property,
            "holds": self.holds,
            "constants": self.constants,
            "counterexample": self.counterexample.as_ref().map(Counterexample::to_json),
            "method": self.method,
        })
    }
}

/// Where a property is tested.
#[derive(Clone, Debug, PartialEq)]
pub enum Carrier {
    Intervals(RationalIntervalSet),
    Points(Vec<Point>),
}

/// A set `Λ` together with the margin used to inflate it to a neighbourhood.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionSpec {
    pub carrier: Carrier,
    pub margin: Rational,
}

impl RegionSpec {
    pub fn intervals(set: RationalIntervalSet) -> Self {
        Self { carrier: Carrier::Intervals(set), margin: int(0) }
    }

    pub fn interval(lo: Rational, hi: Rational) -> Self {
        Self::intervals(RationalIntervalSet::single(Interval::new(lo, hi).expect("ordered")))
    }

    pub fn points(points: Vec<Point>) -> Self {
        Self { carrier: Carrier::Points(points), margin: int(0) }
    }

    pub fn with_margin(mut self, margin: Rational) -> Self {
        self.margin = margin;
        self
    }

    /// Half the distance from the carrier to the critical set, or `1/4`
    /// when that distance is infinite. Zero when the carrier meets it.
    pub fn default_margin(&self, system: &SystemSpec) -> Rational {
        let Some(set) = self.real_set() else { return int(0) };
        let crit = system.critical_reals();
        if crit.is_empty() {
            return Rational::new(1.into(), 4.into());
        }
        crit.iter()
            .filter_map(|c| set.distance_to(c))
            .min()
            .map(|d| d / int(2))
            .unwrap_or_else(|| Rational::new(1.into(), 4.into()))
    }

    /// The carrier as a set of reals.
    pub fn real_set(&self) -> Option<RationalIntervalSet> {
        match &self.carrier {
            Carrier::Intervals(s) => Some(s.clone()),
            Carrier::Points(ps) => {
                let xs: Option<Vec<Rational>> = ps.iter().map(|p| p.real().cloned()).collect();
                Some(RationalIntervalSet::points(xs?))
            }
        }
    }

    /// Carrier inflated by the margin and clipped to the space.
    pub fn neighbourhood(&self, system: &SystemSpec) -> Option<RationalIntervalSet> {
        let set = self.real_set()?;
        let space = system.space()?;
        Some(set.inflate(&self.margin).intersect(&space))
    }
}

fn check_mu(mu: &Rational) -> Result<(), ExpansivityError> {
    if *mu <= int(1) {
        return Err(ExpansivityError::Precondition(format!("expansion factor {mu} must exceed 1")));
    }
    Ok(())
}

fn check_positive(name: &str, r: &Rational) -> Result<(), ExpansivityError> {
    if *r <= int(0) {
        return Err(ExpansivityError::Precondition(format!("{name} must be positive, got {r}")));
    }
    Ok(())
}

/// Carrier points for interval systems, clipped to the space.
fn carrier_set(system: &SystemSpec, region: &RegionSpec) -> Result<RationalIntervalSet, ExpansivityError> {
    let set = region
        .real_set()
        .ok_or_else(|| ExpansivityError::Precondition("region points must be real".into()))?;
    let space = system.space().ok_or(ExpansivityError::Unsupported(system.kind()))?;
    Ok(set.intersect(&space))
}

/// Hull of the space of an interval system.
fn space_hull(system: &SystemSpec) -> Option<Interval<Rational>> {
    system.space()?.hull()
}

/// Exact image of a closed interval under a piecewise-affine or quadratic map.
fn interval_image(system: &SystemSpec, iv: &Interval<Rational>) -> Result<Interval<Rational>, ExpansivityError> {
    match system {
        SystemSpec::Pl(f) => Ok(f.image_interval(iv)),
        SystemSpec::Quadratic(q) => {
            let mut vals = vec![q.eval(iv.lo()), q.eval(iv.hi())];
            let c = q.critical_point();
            if iv.contains(&c) {
                vals.push(q.eval(&c));
            }
            let lo = vals.iter().min().cloned().expect("nonempty");
            let hi = vals.into_iter().max().expect("nonempty");
            Ok(Interval::new(lo, hi).expect("ordered"))
        }
        other => Err(ExpansivityError::Unsupported(other.kind())),
    }
}
