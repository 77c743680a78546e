//! Concrete dynamical systems behind one interface: points, metric,
//! evaluation, affine branches, preimages and critical points.

mod cantor;
mod pl;
mod quadratic;
mod slimit;
mod symbolic;

use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{
    format_rational, int, parse_rational, pow2_neg, Interval, NumericsError, Rational, RationalIntervalSet,
};

pub use cantor::{middle_thirds, symmetric_cantor, CantorSystem};
pub use pl::{Branch, PiecewiseLinearMap};
pub use quadratic::{QuadraticFamily, QuadraticFamilyMap};
pub use slimit::SLimitSystem;
pub use symbolic::{format_binary, OdometerSystem, ShiftPoint, ShiftSystem};

/// Default enclosure precision for quadratic preimages, in bits.
pub const DEFAULT_PRECISION: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("point outside the domain: {0}")]
    OutOfDomain(String),
    #[error("points of different kinds")]
    MixedPoints,
    #[error("operation not supported for {0} systems")]
    Unsupported(&'static str),
    #[error("invalid system: {0}")]
    Invalid(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A point of some system's space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Real(Rational),
    /// Odometer word, least significant symbol first.
    Word(Vec<u8>),
    Seq(ShiftPoint),
}

impl Point {
    pub fn real(&self) -> Option<&Rational> {
        match self {
            Point::Real(x) => Some(x),
            _ => None,
        }
    }
}

impl From<Rational> for Point {
    fn from(x: Rational) -> Self {
        Point::Real(x)
    }
}

pub type PiecewiseLinearRational = PiecewiseLinearMap<Rational>;

#[derive(Clone, Debug, PartialEq)]
pub enum SystemSpec {
    Pl(PiecewiseLinearRational),
    Quadratic(QuadraticFamilyMap),
    Cantor(CantorSystem),
    Sft(ShiftSystem),
    Odometer(OdometerSystem),
    SLimit(SLimitSystem),
}

impl SystemSpec {
    pub fn tent(lambda: Rational) -> Result<Self, SystemError> {
        Ok(SystemSpec::Pl(PiecewiseLinearMap::tent(lambda)?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SystemSpec::Pl(_) => "pl",
            SystemSpec::Quadratic(_) => "quadratic",
            SystemSpec::Cantor(_) => "cantor",
            SystemSpec::Sft(_) => "sft",
            SystemSpec::Odometer(_) => "odometer",
            SystemSpec::SLimit(_) => "slimit",
        }
    }

    pub fn is_interval(&self) -> bool {
        matches!(self, SystemSpec::Pl(_) | SystemSpec::Quadratic(_) | SystemSpec::Cantor(_) | SystemSpec::SLimit(_))
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, SystemSpec::Sft(_) | SystemSpec::Odometer(_))
    }

    /// The ambient space of an interval-type system.
    pub fn space(&self) -> Option<RationalIntervalSet> {
        match self {
            SystemSpec::Pl(_) => Some(unit()),
            SystemSpec::Quadratic(q) => Some(RationalIntervalSet::single(q.domain())),
            SystemSpec::Cantor(c) => Some(c.space()),
            SystemSpec::SLimit(s) => Some(s.space()),
            _ => None,
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match (self, x) {
            (SystemSpec::Sft(s), Point::Seq(p)) => s.contains(p),
            (SystemSpec::Odometer(o), Point::Word(w)) => o.contains(w),
            (SystemSpec::Cantor(c), Point::Real(r)) => {
                r == &int(0) || (c.approximation().contains(r) && CantorSystem::piece_of(r).is_some())
            }
            (SystemSpec::SLimit(s), Point::Real(r)) => s.contains(r),
            (_, Point::Real(r)) => self.space().is_some_and(|sp| sp.contains(r)),
            _ => false,
        }
    }

    pub fn eval_real(&self, x: &Rational) -> Result<Rational, SystemError> {
        let outside = || SystemError::OutOfDomain(format_rational(x));
        match self {
            SystemSpec::Pl(m) => m.eval(x).ok_or_else(outside),
            SystemSpec::Quadratic(q) => {
                if q.domain().contains(x) {
                    Ok(q.eval(x))
                } else {
                    Err(outside())
                }
            }
            SystemSpec::Cantor(c) => c.eval(x),
            SystemSpec::SLimit(s) => s.eval(x),
            _ => Err(SystemError::MixedPoints),
        }
    }

    pub fn eval(&self, x: &Point) -> Result<Point, SystemError> {
        match (self, x) {
            (SystemSpec::Sft(s), Point::Seq(p)) => {
                if !s.contains(p) {
                    return Err(SystemError::OutOfDomain(p.format(s.alphabet())));
                }
                Ok(Point::Seq(p.shift()))
            }
            (SystemSpec::Odometer(o), Point::Word(w)) => {
                if !o.contains(w) {
                    return Err(SystemError::OutOfDomain(format_binary(w)));
                }
                Ok(Point::Word(o.add_one(w)))
            }
            (_, Point::Real(r)) => self.eval_real(r).map(Point::Real),
            _ => Err(SystemError::MixedPoints),
        }
    }

    /// `f^n(x)`.
    pub fn iterate(&self, x: &Point, n: usize) -> Result<Point, SystemError> {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.eval(&y)?;
        }
        Ok(y)
    }

    pub fn orbit(&self, x: &Point, n: usize) -> Result<Vec<Point>, SystemError> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(x.clone());
        for i in 0..n {
            let next = self.eval(&out[i])?;
            out.push(next);
        }
        Ok(out)
    }

    /// Maximal affine pieces meeting the window.
    pub fn branches(&self, window: &RationalIntervalSet) -> Result<Vec<Branch<Rational>>, SystemError> {
        match self {
            SystemSpec::Pl(m) => Ok(m.branches(window)),
            SystemSpec::Cantor(c) => Ok(c.branches(window)),
            other => Err(SystemError::Unsupported(other.kind())),
        }
    }

    pub fn is_piecewise_affine(&self) -> bool {
        matches!(self, SystemSpec::Pl(_) | SystemSpec::Cantor(_))
    }

    /// `{x : f(x) in target}`, exact for affine systems and an outer enclosure otherwise.
    pub fn preimage_set(&self, target: &RationalIntervalSet) -> Result<RationalIntervalSet, SystemError> {
        Ok(self.preimage_bounds(target, DEFAULT_PRECISION)?.0)
    }

    /// `preimage_set(target) ∩ window`; piecewise-affine maps only touch the
    /// pieces over the window.
    pub fn preimage_within(
        &self,
        target: &RationalIntervalSet,
        window: &Interval<Rational>,
    ) -> Result<RationalIntervalSet, SystemError> {
        match self {
            SystemSpec::Pl(m) => Ok(m.preimage_within(target, window)),
            _ => Ok(self.preimage_set(target)?.intersect_interval(window)),
        }
    }

    /// `(outer, inner)` preimage enclosures; equal for piecewise-affine systems.
    pub fn preimage_bounds(
        &self,
        target: &RationalIntervalSet,
        bits: u32,
    ) -> Result<(RationalIntervalSet, RationalIntervalSet), SystemError> {
        match self {
            SystemSpec::Pl(m) => {
                let p = m.preimage(target);
                Ok((p.clone(), p))
            }
            SystemSpec::Cantor(c) => {
                let p = c.preimage(target);
                Ok((p.clone(), p))
            }
            SystemSpec::Quadratic(q) => Ok(q.preimage_bounds(target, bits)),
            SystemSpec::SLimit(s) => Ok(s.preimage_bounds(target, bits)),
            other => Err(SystemError::Unsupported(other.kind())),
        }
    }

    /// Exact preimages of a single point under piecewise-affine systems.
    pub fn point_preimages(&self, y: &Rational) -> Result<Vec<Rational>, SystemError> {
        let space = self.space().ok_or(SystemError::Unsupported(self.kind()))?;
        let mut out: Vec<Rational> = self
            .branches(&space)?
            .iter()
            .flat_map(|b| b.preimage(&RationalIntervalSet::point(y.clone())).ok())
            .flat_map(|s| s.into_parts().into_iter().map(|p| p.lo().clone()))
            .filter(|x| space.contains(x))
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn critical_set(&self) -> Result<Vec<Point>, SystemError> {
        match self {
            SystemSpec::Pl(m) => Ok(m.critical_points().into_iter().map(Point::Real).collect()),
            SystemSpec::Quadratic(q) => Ok(vec![Point::Real(q.critical_point())]),
            SystemSpec::Cantor(_) | SystemSpec::SLimit(_) => Ok(Vec::new()),
            other => Err(SystemError::Unsupported(other.kind())),
        }
    }

    pub fn critical_reals(&self) -> Vec<Rational> {
        self.critical_set()
            .unwrap_or_default()
            .into_iter()
            .filter_map(|p| p.real().cloned())
            .collect()
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<Rational, SystemError> {
        distance(x, y)
    }

    /// Global Lipschitz constant of piecewise-affine and polynomial systems.
    pub fn lipschitz(&self) -> Option<Rational> {
        match self {
            SystemSpec::Pl(m) => Some(m.lipschitz()),
            SystemSpec::Cantor(_) => Some(int(9)),
            SystemSpec::Quadratic(q) => {
                let d = q.domain();
                let (a, _, _) = q.derivatives(d.lo());
                let (b, _, _) = q.derivatives(d.hi());
                Some(if a.abs() >= b.abs() { a.abs() } else { b.abs() })
            }
            SystemSpec::SLimit(_) => Some(int(2)),
            SystemSpec::Odometer(_) => Some(int(1)),
            SystemSpec::Sft(_) => Some(int(2)),
        }
    }

    pub fn parse_point(&self, s: &str) -> Result<Point, SystemError> {
        match self {
            SystemSpec::Sft(sys) => Ok(Point::Seq(sys.parse_point(s)?)),
            SystemSpec::Odometer(o) => {
                let w: Vec<u8> = s
                    .trim()
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(SystemError::Invalid(format!("bad odometer symbol {c:?}"))),
                    })
                    .collect::<Result<_, _>>()?;
                if !o.contains(&w) {
                    return Err(SystemError::OutOfDomain(s.to_string()));
                }
                Ok(Point::Word(w))
            }
            _ => Ok(Point::Real(parse_rational(s)?)),
        }
    }

    pub fn format_point(&self, p: &Point) -> String {
        match (self, p) {
            (SystemSpec::Sft(s), Point::Seq(q)) => q.format(s.alphabet()),
            (_, p) => format_point(p),
        }
    }
}

/// Metric shared by all systems: `|x - y|` on the line, `2^-k` on sequence spaces.
pub fn distance(x: &Point, y: &Point) -> Result<Rational, SystemError> {
    match (x, y) {
        (Point::Real(a), Point::Real(b)) => Ok((a - b).abs()),
        (Point::Word(a), Point::Word(b)) => {
            if a.len() != b.len() {
                return Err(SystemError::MixedPoints);
            }
            Ok(match a.iter().zip(b).position(|(p, q)| p != q) {
                Some(k) => pow2_neg(k as u32),
                None => int(0),
            })
        }
        (Point::Seq(a), Point::Seq(b)) => Ok(match a.common_prefix(b) {
            Some(k) => pow2_neg(k as u32),
            None => int(0),
        }),
        _ => Err(SystemError::MixedPoints),
    }
}

pub fn format_point(p: &Point) -> String {
    match p {
        Point::Real(x) => format_rational(x),
        Point::Word(w) => format_binary(w),
        Point::Seq(s) => s.to_string(),
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_point(self))
    }
}

fn unit() -> RationalIntervalSet {
    RationalIntervalSet::from_pairs([(int(0), int(1))]).expect("ordered")
}

/// Wire format of [`SystemSpec`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SystemJson {
    Pl {
        #[serde(with = "crate::numerics::vec_rational_serde")]
        breakpoints: Vec<Rational>,
        #[serde(with = "crate::numerics::vec_rational_serde")]
        values: Vec<Rational>,
    },
    Quadratic {
        family: QuadraticFamily,
        #[serde(with = "crate::numerics::rational_serde")]
        parameter: Rational,
    },
    Cantor {
        depth: u32,
    },
    Sft {
        alphabet: Vec<String>,
        #[serde(default)]
        forbidden: Vec<String>,
    },
    Odometer {
        depth: usize,
    },
    Slimit {
        tail_depth: u32,
    },
}

impl TryFrom<SystemJson> for SystemSpec {
    type Error = SystemError;

    fn try_from(j: SystemJson) -> Result<Self, SystemError> {
        Ok(match j {
            SystemJson::Pl { breakpoints, values } => SystemSpec::Pl(PiecewiseLinearMap::new(breakpoints, values)?),
            SystemJson::Quadratic { family, parameter } => {
                SystemSpec::Quadratic(QuadraticFamilyMap::new(family, parameter)?)
            }
            SystemJson::Cantor { depth } => SystemSpec::Cantor(CantorSystem::new(depth)?),
            SystemJson::Sft { alphabet, forbidden } => {
                let chars = alphabet
                    .iter()
                    .map(|s| {
                        let mut it = s.chars();
                        match (it.next(), it.next()) {
                            (Some(c), None) => Ok(c),
                            _ => Err(SystemError::Invalid(format!("alphabet symbol {s:?} is not one character"))),
                        }
                    })
                    .collect::<Result<Vec<char>, _>>()?;
                let base = ShiftSystem::new(chars.clone(), Vec::new())?;
                let words = forbidden.iter().map(|w| base.parse_word(w)).collect::<Result<Vec<_>, _>>()?;
                SystemSpec::Sft(ShiftSystem::new(chars, words)?)
            }
            SystemJson::Odometer { depth } => SystemSpec::Odometer(OdometerSystem::new(depth)?),
            SystemJson::Slimit { tail_depth } => SystemSpec::SLimit(SLimitSystem::new(tail_depth)?),
        })
    }
}

impl From<&SystemSpec> for SystemJson {
    fn from(s: &SystemSpec) -> Self {
        match s {
            SystemSpec::Pl(m) => SystemJson::Pl { breakpoints: m.breakpoints().to_vec(), values: m.values().to_vec() },
            SystemSpec::Quadratic(q) => SystemJson::Quadratic { family: q.family, parameter: q.parameter.clone() },
            SystemSpec::Cantor(c) => SystemJson::Cantor { depth: c.depth() },
            SystemSpec::Sft(sft) => SystemJson::Sft {
                alphabet: sft.alphabet().iter().map(|c| c.to_string()).collect(),
                forbidden: sft.forbidden().iter().map(|w| sft.format_word(w)).collect(),
            },
            SystemSpec::Odometer(o) => SystemJson::Odometer { depth: o.depth() },
            SystemSpec::SLimit(s) => SystemJson::Slimit { tail_depth: s.tail_depth() },
        }
    }
}

impl Serialize for SystemSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SystemJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SystemSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = SystemJson::deserialize(d)?;
        SystemSpec::try_from(j).map_err(serde::de::Error::custom)
    }
}
