//! Ball expanding: `B̄_{με}(f(x)) ∩ X ⊆ f(B̄_ε(x) ∩ X)` for `x` in `Λ` and `0 < ε < ν`.
//!
//! Each tested `(x, ε)` is decided exactly. For piecewise-affine interval
//! maps the whole continuum is decided by splitting the `(x, ε)` plane into
//! cells on which the pieces containing `x`, `x - ε` and `x + ε` are fixed;
//! in a cell the image endpoints are maxima and minima of affine forms, so
//! a failure is a planar feasibility problem.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::numerics::{format_rational, int, pow3_neg, Interval, Rational, RationalIntervalSet};
use crate::pseudo_orbits::sample_set;
use crate::systems::{CantorSystem, PiecewiseLinearRational, Point, SystemSpec};

use super::polygon::{feasible_point, Constraint, Form};
use super::{
    carrier_set, check_mu, check_positive, interval_image, space_hull, Constants, Counterexample,
    ExpansivityError, ExpansivityVerdict, Property, RegionSpec,
};

const SAMPLES: usize = 16;

pub fn check_ball_expanding(
    system: &SystemSpec,
    region: &RegionSpec,
    mu: &Rational,
    nu: &Rational,
    eps_grid: &[Rational],
) -> Result<ExpansivityVerdict, ExpansivityError> {
    check_mu(mu)?;
    check_positive("nu", nu)?;
    if let Some(e) = eps_grid.iter().find(|e| **e <= int(0) || *e >= nu) {
        return Err(ExpansivityError::Precondition(format!("radius {e} is outside (0, nu)")));
    }
    let consts = Constants { mu: Some(mu.clone()), nu: Some(nu.clone()), ..Constants::default() };
    let property = Property::BallExpanding;
    match system {
        SystemSpec::Pl(_) | SystemSpec::Quadratic(_) => {
            let carrier = carrier_set(system, region)?;
            let hull = space_hull(system).expect("interval system");
            for x in tested_points(system, &carrier, nu, eps_grid) {
                for eps in eps_grid {
                    if let Some(cex) = ball_gap(system, &hull, &x, eps, mu)? {
                        return Ok(ExpansivityVerdict::falsified(property, consts, cex, "tested centre and radius"));
                    }
                }
            }
            let SystemSpec::Pl(f) = system else {
                return Ok(ExpansivityVerdict::undetermined(property, consts, "no failure at tested centres"));
            };
            match cell_failure(f, &carrier, mu, nu) {
                None => Ok(ExpansivityVerdict::certified(property, consts, "exact cell decomposition")),
                Some((x, eps)) => Ok(match ball_gap(system, &hull, &x, &eps, mu)? {
                    Some(cex) => ExpansivityVerdict::falsified(property, consts, cex, "exact cell decomposition"),
                    None => ExpansivityVerdict::undetermined(property, consts, "cell point failed re-evaluation"),
                }),
            }
        }
        SystemSpec::Cantor(c) => {
            let carrier = carrier_set(system, region)?;
            let mut xs: Vec<Rational> = Vec::new();
            if carrier.contains(&int(0)) {
                xs.push(int(0));
            }
            for p in carrier.parts() {
                xs.push(p.lo().clone());
                xs.push(p.hi().clone());
            }
            xs.extend(samples(&carrier));
            for x in &xs {
                for eps in eps_grid {
                    if let Some(cex) = cantor_gap(c, x, eps, mu)? {
                        return Ok(ExpansivityVerdict::falsified(property, consts, cex, "tested centre and radius"));
                    }
                }
            }
            Ok(ExpansivityVerdict::undetermined(property, consts, "no failure at tested centres"))
        }
        _ => Ok(ExpansivityVerdict::undetermined(property, consts, "no decision procedure")),
    }
}

fn samples(set: &RationalIntervalSet) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    (0..SAMPLES).filter_map(|_| sample_set(set, &mut rng)).collect()
}

fn tested_points(system: &SystemSpec, carrier: &RationalIntervalSet, nu: &Rational, grid: &[Rational]) -> Vec<Rational> {
    let mut xs: Vec<Rational> = carrier.parts().iter().flat_map(|p| [p.lo().clone(), p.hi().clone()]).collect();
    let mut special: Vec<Rational> = match system {
        SystemSpec::Pl(f) => f.breakpoints().to_vec(),
        _ => system.critical_reals(),
    };
    let reach = carrier.inflate(nu);
    special.retain(|b| reach.contains(b));
    for b in &special {
        xs.push(b.clone());
        for e in grid {
            xs.push(b - e);
            xs.push(b + e);
        }
    }
    xs.extend(samples(carrier));
    xs.retain(|x| carrier.contains(x));
    xs.sort();
    xs.dedup();
    xs
}

/// Failure of the ball condition at one centre and radius on an interval space.
pub(super) fn ball_gap(
    system: &SystemSpec,
    hull: &Interval<Rational>,
    x: &Rational,
    eps: &Rational,
    mu: &Rational,
) -> Result<Option<Counterexample>, ExpansivityError> {
    let ball = Interval::ball(x, eps).intersect(hull).expect("centre lies in the space");
    let img = interval_image(system, &ball)?;
    let fx = system.eval_real(x)?;
    let reach = Interval::ball(&fx, &(mu * eps)).intersect(hull).expect("value lies in the space");
    let (y, gap) = if img.hi() < reach.hi() {
        (reach.hi().clone(), reach.hi() - img.hi())
    } else if img.lo() > reach.lo() {
        (reach.lo().clone(), img.lo() - reach.lo())
    } else {
        return Ok(None);
    };
    Ok(Some(Counterexample {
        inequality: format!("f(B(x, eps)) = {img} does not contain {} from B(f(x), mu eps) = {reach}", format_rational(&y)),
        x: Point::Real(x.clone()),
        y: Point::Real(y),
        radius: Some(eps.clone()),
        horizon: None,
        quantity: gap,
    }))
}

/// Some `(x, ε)` with `x` in the carrier and `0 < ε < ν` where the ball
/// condition fails, if any.
fn cell_failure(
    f: &PiecewiseLinearRational,
    carrier: &RationalIntervalSet,
    mu: &Rational,
    nu: &Rational,
) -> Option<(Rational, Rational)> {
    let bps = f.breakpoints();
    let vals = f.values();
    let pieces: Vec<_> = f.pieces().collect();
    let n = pieces.len();
    let eps_box = Interval::new(int(0), nu.clone()).expect("nu > 0");
    // coordinates: u = x, v = ε
    let (x, e) = (Form::u(), Form::v());
    let left_end = || x.clone() - e.clone();
    let right_end = || x.clone() + e.clone();
    for part in carrier.parts() {
        for (p, piece) in pieces.iter().enumerate() {
            let Some(xbox) = part.intersect(&piece.interval) else { continue };
            let fx = Form::new(piece.slope.clone(), int(0), piece.offset.clone());
            let lefts = std::iter::once(None).chain((0..=p).map(Some));
            for left in lefts {
                for right in std::iter::once(None).chain((p..n).map(Some)) {
                    let mut cons: Vec<Constraint> =
                        vec![e.clone().positive(), (Form::constant(nu.clone()) - e.clone()).positive()];
                    let (f_left, first) = match left {
                        None => {
                            cons.push((e.clone() - x.clone()).nonnegative());
                            (Form::constant(vals[0].clone()), 1)
                        }
                        Some(i) => {
                            let b = &pieces[i];
                            cons.push((left_end() - Form::constant(bps[i].clone())).nonnegative());
                            cons.push((Form::constant(bps[i + 1].clone()) - left_end()).nonnegative());
                            (Form::new(b.slope.clone(), -b.slope.clone(), b.offset.clone()), i + 1)
                        }
                    };
                    let (f_right, last) = match right {
                        None => {
                            cons.push((right_end() - Form::constant(int(1))).nonnegative());
                            (Form::constant(vals[n].clone()), n - 1)
                        }
                        Some(j) => {
                            let b = &pieces[j];
                            cons.push((right_end() - Form::constant(bps[j].clone())).nonnegative());
                            cons.push((Form::constant(bps[j + 1].clone()) - right_end()).nonnegative());
                            (Form::new(b.slope.clone(), b.slope.clone(), b.offset.clone()), j)
                        }
                    };
                    let mut cands = vec![f_left, f_right];
                    cands.extend((first..=last).map(|k| Form::constant(vals[k].clone())));

                    let top = fx.clone() + e.clone() * mu;
                    let bottom = fx.clone() - e.clone() * mu;
                    let mut upper = cons.clone();
                    let mut lower = cons;
                    for v in &cands {
                        upper.push((top.clone() - v.clone()).positive());
                        upper.push((Form::constant(int(1)) - v.clone()).positive());
                        lower.push((v.clone() - bottom.clone()).positive());
                        lower.push(v.clone().positive());
                    }
                    for cons in [upper, lower] {
                        if let Some(pt) = feasible_point(&xbox, &eps_box, &cons) {
                            return Some(pt);
                        }
                    }
                }
            }
        }
    }
    None
}

/// `f(X ∩ [-3^-n, 3^-n])` for the truncated map. The open window
/// `(-2/3^n, 2/3^n)` meets the Cantor set in the same points.
pub fn cantor_origin_image(system: &CantorSystem, n: u32) -> RationalIntervalSet {
    let r = pow3_neg(n);
    system.image(&system.space().intersect_interval(&Interval::new(-r.clone(), r).expect("ordered")))
}

/// `X ∩ [0, upper]` at the resolution the truncated map produces: the
/// approximation one level coarser, restricted to pieces of index at most
/// `depth - 2`, together with 0.
pub fn cantor_truncated_segment(system: &CantorSystem, upper: &Rational) -> RationalIntervalSet {
    let zero = RationalIntervalSet::point(int(0));
    let Some(level) = system.depth().checked_sub(2) else { return zero };
    let floor = int(2) * pow3_neg(level);
    match Interval::new(floor, upper.clone()) {
        Ok(iv) => system.codomain().intersect_interval(&iv).union(&zero),
        Err(_) => zero,
    }
}

/// Points the truncated map can reach in full.
fn cantor_reach(system: &CantorSystem) -> RationalIntervalSet {
    let top = cantor_truncated_segment(system, &int(1));
    top.union(&top.affine_image(&int(-1), &int(0)).expect("nonzero slope"))
}

pub(super) fn cantor_gap(
    system: &CantorSystem,
    x: &Rational,
    eps: &Rational,
    mu: &Rational,
) -> Result<Option<Counterexample>, ExpansivityError> {
    let ball = system.space().intersect_interval(&Interval::ball(x, eps));
    let img = system.image(&ball);
    let fx = system.eval(x)?;
    let target = cantor_reach(system).intersect_interval(&Interval::ball(&fx, &(mu * eps)));
    let Some(y) = target.point_outside(&img) else { return Ok(None) };
    let gap = img.distance_to(&y).unwrap_or_else(|| int(1));
    Ok(Some(Counterexample {
        inequality: format!(
            "{} lies in X within mu eps = {} of f(x) = {} but outside f(X ∩ B(x, eps))",
            format_rational(&y),
            format_rational(&(mu * eps)),
            format_rational(&fx)
        ),
        x: Point::Real(x.clone()),
        y: Point::Real(y),
        radius: Some(eps.clone()),
        horizon: None,
        quantity: gap,
    }))
}
