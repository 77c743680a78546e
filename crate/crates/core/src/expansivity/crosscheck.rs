//! Both sides of the equivalence "open and expanding on a neighbourhood of Λ"
//! versus "ball expanding on a neighbourhood of Λ and locally one-to-one on Λ",
//! each evaluated with searched constants.

use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};

use crate::numerics::{int, pow2_neg, rat, Rational, RationalIntervalSet};
use crate::systems::SystemSpec;

use super::{
    check_ball_expanding, check_expanding, check_locally_injective, check_open_on, check_star, Constants,
    ExpansivityError, ExpansivityVerdict, Holds, Property, RegionSpec,
};

#[derive(Clone, Debug, PartialEq)]
pub struct SideReport {
    pub holds: Holds,
    pub parts: Vec<ExpansivityVerdict>,
}

impl SideReport {
    fn of(parts: Vec<ExpansivityVerdict>) -> Self {
        let holds = if parts.iter().any(ExpansivityVerdict::is_falsified) {
            Holds::Falsified
        } else if parts.iter().all(ExpansivityVerdict::is_certified) {
            Holds::Certified
        } else {
            Holds::Undetermined
        };
        Self { holds, parts }
    }

    fn to_json(&self) -> Value {
        json!({
            "holds": self.holds,
            "parts": self.parts.iter().map(ExpansivityVerdict::to_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrosscheckReport {
    pub neighbourhood: RationalIntervalSet,
    pub margin: Rational,
    /// Open and expanding on the neighbourhood.
    pub open_expanding: SideReport,
    /// Ball expanding on the neighbourhood and locally one-to-one on the region.
    pub ball_injective: SideReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agreement {
    Agree,
    /// One side undetermined.
    Partial,
    /// One side certified and the other falsified.
    Conflict,
}

impl std::fmt::Display for Agreement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Agreement::Agree => "agree",
            Agreement::Partial => "partial",
            Agreement::Conflict => "conflict",
        })
    }
}

impl CrosscheckReport {
    pub fn agreement(&self) -> Agreement {
        match (self.open_expanding.holds, self.ball_injective.holds) {
            (a, b) if a == b => Agreement::Agree,
            (Holds::Undetermined, _) | (_, Holds::Undetermined) => Agreement::Partial,
            _ => Agreement::Conflict,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.agreement() != Agreement::Conflict
    }

    pub fn to_json(&self) -> Value {
        json!({
            "neighbourhood": self.neighbourhood,
            "margin": crate::numerics::format_rational(&self.margin),
            "open_and_expanding": self.open_expanding.to_json(),
            "ball_expanding_and_locally_injective": self.ball_injective.to_json(),
            "agreement": self.agreement(),
        })
    }
}

/// Candidate expansion factors: the smallest expansion the map shows on the set.
fn mu_candidates(system: &SystemSpec, set: &RationalIntervalSet) -> Vec<Rational> {
    let floor = int(1) + pow2_neg(10);
    let mu = match system {
        SystemSpec::Pl(_) => system
            .branches(set)
            .ok()
            .and_then(|bs| bs.iter().filter(|b| !b.interval.is_degenerate()).map(|b| b.slope.abs()).min()),
        SystemSpec::Cantor(_) => Some(int(3)),
        SystemSpec::Quadratic(q) => set.hull().map(|h| {
            let c = q.critical_point();
            if h.contains(&c) {
                int(0)
            } else {
                let near = if *h.hi() < c { h.hi() } else { h.lo() };
                q.derivatives(near).0.abs()
            }
        }),
        _ => None,
    };
    match mu {
        Some(m) if m > int(1) => vec![m],
        _ => vec![floor],
    }
}

fn scale_candidates(system: &SystemSpec, margin: &Rational) -> Vec<Rational> {
    let mut out = match system {
        SystemSpec::Cantor(_) => vec![rat(1, 27), rat(1, 54)],
        _ => vec![rat(1, 4), rat(1, 16), rat(1, 64)],
    };
    if *margin > int(0) && !out.contains(margin) && !matches!(system, SystemSpec::Cantor(_)) {
        out.insert(0, margin.clone());
    }
    out
}

fn eps_grid(system: &SystemSpec, nu: &Rational) -> Vec<Rational> {
    match system {
        SystemSpec::Cantor(_) => vec![nu / int(2)],
        _ => vec![nu / int(2), nu / int(4)],
    }
}

/// First certification over the candidates; otherwise falsified only when
/// every candidate was falsified.
fn search(
    property: Property,
    mut run: impl FnMut(&Rational, &Rational) -> Result<ExpansivityVerdict, ExpansivityError>,
    mus: &[Rational],
    scales: &[Rational],
) -> Result<ExpansivityVerdict, ExpansivityError> {
    let mut last = None;
    let mut all_falsified = true;
    for mu in mus {
        for s in scales {
            let v = run(mu, s)?;
            if v.is_certified() {
                return Ok(v);
            }
            all_falsified &= v.is_falsified();
            last = Some(v);
        }
    }
    match last {
        Some(v) if all_falsified => Ok(v),
        _ => Ok(ExpansivityVerdict::undetermined(property, Constants::default(), "no candidate constants decided")),
    }
}

/// Some `(μ, ν)` from the candidates for which ball expanding is certified on the region.
pub fn find_ball_constants(
    system: &SystemSpec,
    region: &RegionSpec,
    mus: &[Rational],
    nus: &[Rational],
) -> Result<Option<ExpansivityVerdict>, ExpansivityError> {
    for mu in mus {
        for nu in nus {
            let v = check_ball_expanding(system, region, mu, nu, &eps_grid(system, nu))?;
            if v.is_certified() {
                return Ok(Some(v));
            }
        }
    }
    Ok(None)
}

/// Some `(δ, μ)` from the candidates for which (★) is certified on the region.
pub fn find_star_constants(
    system: &SystemSpec,
    region: &RegionSpec,
    mus: &[Rational],
    deltas: &[Rational],
) -> Result<Option<ExpansivityVerdict>, ExpansivityError> {
    for mu in mus {
        for delta in deltas {
            let v = check_star(system, region, delta, mu)?;
            if v.is_certified() {
                return Ok(Some(v));
            }
        }
    }
    Ok(None)
}

/// Evaluates both sides on the region inflated by its margin (or by the
/// default margin when the given one is zero).
pub fn theorem25_crosscheck(system: &SystemSpec, lambda: &RegionSpec) -> Result<CrosscheckReport, ExpansivityError> {
    if !matches!(system, SystemSpec::Pl(_) | SystemSpec::Quadratic(_) | SystemSpec::Cantor(_)) {
        return Err(ExpansivityError::Unsupported(system.kind()));
    }
    let margin = if lambda.margin > int(0) { lambda.margin.clone() } else { lambda.default_margin(system) };
    let inflated = lambda.clone().with_margin(margin.clone());
    let hood_set = inflated.neighbourhood(system).ok_or(ExpansivityError::Unsupported(system.kind()))?;
    let hood = RegionSpec::intervals(hood_set.clone());
    let mus = mu_candidates(system, &hood_set);
    let scales = scale_candidates(system, &margin);

    let open = check_open_on(system, &hood)?;
    let expanding = search(Property::Expanding, |mu, d| check_expanding(system, &hood, d, mu), &mus, &scales)?;
    let ball = search(
        Property::BallExpanding,
        |mu, nu| check_ball_expanding(system, &hood, mu, nu, &eps_grid(system, nu)),
        &mus,
        &scales,
    )?;
    let injective = check_locally_injective(system, lambda)?;
    Ok(CrosscheckReport {
        neighbourhood: hood_set,
        margin,
        open_expanding: SideReport::of(vec![open, expanding]),
        ball_injective: SideReport::of(vec![ball, injective]),
    })
}
