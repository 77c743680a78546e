//! Schwarzian derivative of the quadratic families, and the ε-net test for
//! backward images of a finite set.

use num_traits::Zero;
use serde::Serialize;

use crate::numerics::{format_rational, int, opt_rational_serde, rat, Interval, Rational, RationalIntervalSet};
use crate::systems::{Point, QuadraticFamilyMap, SystemSpec};

use super::{space_hull, ExpansivityError};

/// Largest number of preimage points tracked before giving up.
pub const DEFAULT_NET_CAP: usize = 1 << 16;

const NET_BITS: u32 = 96;

/// `f'''/f' - (3/2) (f''/f')^2`.
pub fn schwarzian(map: &QuadraticFamilyMap, x: &Rational) -> Result<Rational, ExpansivityError> {
    let (d1, d2, d3) = map.derivatives(x);
    if d1.is_zero() {
        return Err(ExpansivityError::CriticalPoint(format_rational(x)));
    }
    let ratio = &d2 / &d1;
    Ok(d3 / &d1 - rat(3, 2) * &ratio * &ratio)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetReport {
    /// Whether every point of the space is within `ε` of the set. Only
    /// meaningful when `undetermined` is false.
    pub is_net: bool,
    /// Largest distance from a point of the space to the set (an upper
    /// bound when the points are enclosed rather than exact).
    #[serde(with = "crate::numerics::rational_serde")]
    pub max_gap: Rational,
    /// Lower bound for the same quantity; equal to `max_gap` in exact mode.
    #[serde(with = "opt_rational_serde")]
    pub max_gap_lower: Option<Rational>,
    pub points: usize,
    /// Set when the preimage count hit the cap or the enclosures could not decide.
    pub undetermined: bool,
    pub truncated: bool,
}

/// Tests whether `f^-m(target)` is an `ε`-net of the space.
pub fn eps_net_check(
    system: &SystemSpec,
    target: &[Point],
    m: usize,
    epsilon: &Rational,
) -> Result<NetReport, ExpansivityError> {
    eps_net_check_capped(system, target, m, epsilon, DEFAULT_NET_CAP)
}

pub fn eps_net_check_capped(
    system: &SystemSpec,
    target: &[Point],
    m: usize,
    epsilon: &Rational,
    cap: usize,
) -> Result<NetReport, ExpansivityError> {
    let hull = space_hull(system).ok_or(ExpansivityError::Unsupported(system.kind()))?;
    let start: Vec<Rational> = target
        .iter()
        .map(|p| p.real().cloned().ok_or(ExpansivityError::Unsupported(system.kind())))
        .collect::<Result<_, _>>()?;
    // each point is carried as an enclosure; exact systems keep them degenerate
    let mut current: Vec<Interval<Rational>> = start.into_iter().map(Interval::point).collect();
    let mut truncated = false;
    let mut lossy = false;
    for _ in 0..m {
        let mut next = Vec::new();
        for iv in &current {
            match system {
                SystemSpec::Pl(_) | SystemSpec::Cantor(_) => {
                    next.extend(system.point_preimages(iv.lo())?.into_iter().map(Interval::point));
                }
                SystemSpec::Quadratic(q) => {
                    let (outer, _) = system.preimage_bounds(&RationalIntervalSet::single(iv.clone()), NET_BITS)?;
                    // an enclosure straddling the turning point may hide two preimages
                    let c = q.critical_point();
                    if outer.parts().iter().any(|p| p.contains(&c) && !p.is_degenerate()) {
                        lossy = true;
                    }
                    next.extend(outer.into_parts());
                }
                other => return Err(ExpansivityError::Unsupported(other.kind())),
            }
        }
        if next.len() > cap {
            truncated = true;
            break;
        }
        current = next;
    }
    current.sort_by(|a, b| a.lo().cmp(b.lo()));
    current.dedup();

    let (upper, lower) = gaps(&hull, &current);
    let exact = current.iter().all(Interval::is_degenerate);
    let undetermined = truncated || lossy || (!exact && upper >= *epsilon && lower < *epsilon);
    Ok(NetReport {
        is_net: upper < *epsilon,
        max_gap_lower: Some(lower),
        max_gap: upper,
        points: current.len(),
        undetermined,
        truncated,
    })
}

/// Upper and lower bounds for the largest distance from the space to the
/// enclosed points.
fn gaps(hull: &Interval<Rational>, pts: &[Interval<Rational>]) -> (Rational, Rational) {
    let (Some(first), Some(last)) = (pts.first(), pts.last()) else {
        return (hull.len(), hull.len());
    };
    let mut upper = std::cmp::max(first.hi() - hull.lo(), hull.hi() - last.lo());
    let mut lower = std::cmp::max(first.lo() - hull.lo(), hull.hi() - last.hi());
    for w in pts.windows(2) {
        upper = std::cmp::max(upper, (w[1].hi() - w[0].lo()) / int(2));
        lower = std::cmp::max(lower, (w[1].lo() - w[0].hi()) / int(2));
    }
    (upper, lower)
}
