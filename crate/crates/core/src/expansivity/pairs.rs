//! Expanding and (★): `d(f(x), f(y)) >= μ d(x, y)` whenever `d(x, y) < δ`,
//! with both points in `Λ` or only `x`.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{format_rational, int, pow2_neg, Interval, Rational, RationalIntervalSet};
use crate::pseudo_orbits::sample_set;
use crate::systems::{distance, Point, QuadraticFamilyMap, SystemSpec};

use super::polygon::{feasible_point, Form};
use super::{
    carrier_set, check_mu, check_positive, Carrier, Constants, Counterexample, ExpansivityError,
    ExpansivityVerdict, Property, RegionSpec,
};

const SAMPLE_PAIRS: usize = 2000;

/// Expanding on `Λ`: both points range over the carrier.
pub fn check_expanding(
    system: &SystemSpec,
    region: &RegionSpec,
    delta: &Rational,
    mu: &Rational,
) -> Result<ExpansivityVerdict, ExpansivityError> {
    check_mu(mu)?;
    check_positive("delta", delta)?;
    if system.is_symbolic() {
        return symbolic(system, Property::Expanding, region, delta, mu);
    }
    let xs = carrier_set(system, region)?;
    pair_property(system, Property::Expanding, &xs, &xs, delta, mu)
}

/// (★) on `Λ`: `x` ranges over the carrier, `y` over the whole space.
pub fn check_star(
    system: &SystemSpec,
    lambda: &RegionSpec,
    delta: &Rational,
    mu: &Rational,
) -> Result<ExpansivityVerdict, ExpansivityError> {
    check_mu(mu)?;
    check_positive("delta", delta)?;
    if system.is_symbolic() {
        return symbolic(system, Property::Star, lambda, delta, mu);
    }
    let xs = carrier_set(system, lambda)?;
    let ys = system.space().ok_or(ExpansivityError::Unsupported(system.kind()))?;
    pair_property(system, Property::Star, &xs, &ys, delta, mu)
}

fn constants(delta: &Rational, mu: &Rational) -> Constants {
    Constants { delta: Some(delta.clone()), mu: Some(mu.clone()), ..Constants::default() }
}

/// The pair as a counterexample, if it violates the inequality.
pub(super) fn pair_violation(
    system: &SystemSpec,
    x: &Point,
    y: &Point,
    delta: &Rational,
    mu: &Rational,
) -> Result<Option<Counterexample>, ExpansivityError> {
    let d = distance(x, y)?;
    if d.is_zero() || d >= *delta {
        return Ok(None);
    }
    let df = distance(&system.eval(x)?, &system.eval(y)?)?;
    let bound = mu * &d;
    if df >= bound {
        return Ok(None);
    }
    Ok(Some(Counterexample {
        x: x.clone(),
        y: y.clone(),
        radius: None,
        horizon: None,
        quantity: &df / &d,
        inequality: format!(
            "d(f(x), f(y)) = {} < mu d(x, y) = {} with d(x, y) = {} < delta",
            format_rational(&df),
            format_rational(&bound),
            format_rational(&d)
        ),
    }))
}

fn real_violation(
    system: &SystemSpec,
    x: &Rational,
    y: &Rational,
    delta: &Rational,
    mu: &Rational,
) -> Result<Option<Counterexample>, ExpansivityError> {
    pair_violation(system, &Point::Real(x.clone()), &Point::Real(y.clone()), delta, mu)
}

/// Pairs `x < c < y` with `f(x) = f(y)`, shrinking towards the turning point `c`.
pub(super) fn fold_pairs(system: &SystemSpec, c: &Rational, scale: &Rational) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    match system {
        SystemSpec::Pl(f) => {
            let Some(i) = f.piece_index(c) else { return out };
            if i == 0 {
                return out;
            }
            let slopes = f.slopes();
            let bps = f.breakpoints();
            let ratio = slopes[i - 1].abs() / slopes[i].abs();
            for k in 0..40 {
                let s = scale * pow2_neg(k);
                let (x, y) = (c - &s, c + &s * &ratio);
                if x >= bps[i - 1] && y <= bps[i + 1] {
                    out.push((x, y));
                }
            }
        }
        SystemSpec::Quadratic(q) => {
            let dom = q.domain();
            for k in 0..40 {
                let s = scale * pow2_neg(k);
                let (x, y) = (c - &s, c + &s);
                if dom.contains(&x) && dom.contains(&y) {
                    out.push((x, y));
                }
            }
        }
        _ => {}
    }
    out
}

/// Tries both orientations of candidate pairs against the sets.
fn first_violation(
    system: &SystemSpec,
    pairs: impl IntoIterator<Item = (Rational, Rational)>,
    xs: &RationalIntervalSet,
    ys: &RationalIntervalSet,
    delta: &Rational,
    mu: &Rational,
) -> Result<Option<Counterexample>, ExpansivityError> {
    for (a, b) in pairs {
        for (x, y) in [(&a, &b), (&b, &a)] {
            if xs.contains(x) && ys.contains(y) {
                if let Some(cex) = real_violation(system, x, y, delta, mu)? {
                    return Ok(Some(cex));
                }
            }
        }
    }
    Ok(None)
}

fn fold_violation(
    system: &SystemSpec,
    xs: &RationalIntervalSet,
    ys: &RationalIntervalSet,
    delta: &Rational,
    mu: &Rational,
) -> Result<Option<Counterexample>, ExpansivityError> {
    let scale = delta / int(4);
    for c in system.critical_reals() {
        if let Some(cex) = first_violation(system, fold_pairs(system, &c, &scale), xs, ys, delta, mu)? {
            return Ok(Some(cex));
        }
    }
    Ok(None)
}

/// Affine piece restricted to an interval.
struct Patch {
    iv: Interval<Rational>,
    slope: Rational,
    offset: Rational,
}

fn patches(system: &SystemSpec, set: &RationalIntervalSet) -> Result<Vec<Patch>, ExpansivityError> {
    let mut out = Vec::new();
    for part in set.parts() {
        for b in system.branches(&RationalIntervalSet::single(part.clone()))? {
            out.push(Patch { iv: b.interval, slope: b.slope, offset: b.offset });
        }
    }
    out.sort_by(|a, b| a.iv.lo().cmp(b.iv.lo()));
    Ok(out)
}

/// Some `x` in the first patch and `y` in the second violating the
/// inequality, found exactly.
fn lp_violation(px: &Patch, py: &Patch, delta: &Rational, mu: &Rational) -> Option<(Rational, Rational)> {
    // variables: u = x, v = y
    let df = Form::new(-px.slope.clone(), py.slope.clone(), &py.offset - &px.offset);
    for sign in [int(1), int(-1)] {
        let d = (Form::v() - Form::u()) * &sign;
        let cons = vec![
            d.clone().positive(),
            (Form::constant(delta.clone()) - d.clone()).positive(),
            (d.clone() * mu - df.clone()).positive(),
            (df.clone() + d * mu).positive(),
        ];
        if let Some(p) = feasible_point(&px.iv, &py.iv, &cons) {
            return Some(p);
        }
    }
    None
}

fn piecewise_affine(
    system: &SystemSpec,
    property: Property,
    xs: &RationalIntervalSet,
    ys: &RationalIntervalSet,
    delta: &Rational,
    mu: &Rational,
) -> Result<ExpansivityVerdict, ExpansivityError> {
    let consts = constants(delta, mu);
    if let Some(cex) = fold_violation(system, xs, ys, delta, mu)? {
        return Ok(ExpansivityVerdict::falsified(property, consts, cex, "equal images across a turning point"));
    }
    let px = patches(system, xs)?;
    let py = patches(system, ys)?;
    for a in &px {
        let reach_lo = a.iv.lo() - delta;
        let reach_hi = a.iv.hi() + delta;
        let start = py.partition_point(|b| *b.iv.hi() <= reach_lo);
        for b in py[start..].iter().take_while(|b| *b.iv.lo() < reach_hi) {
            let Some((x, y)) = lp_violation(a, b, delta, mu) else { continue };
            return Ok(match real_violation(system, &x, &y, delta, mu)? {
                Some(cex) => ExpansivityVerdict::falsified(property, consts, cex, "exact piecewise-affine case analysis"),
                None => ExpansivityVerdict::undetermined(property, consts, "case analysis point failed re-evaluation"),
            });
        }
    }
    Ok(ExpansivityVerdict::certified(property, consts, "exact piecewise-affine case analysis"))
}

fn pair_property(
    system: &SystemSpec,
    property: Property,
    xs: &RationalIntervalSet,
    ys: &RationalIntervalSet,
    delta: &Rational,
    mu: &Rational,
) -> Result<ExpansivityVerdict, ExpansivityError> {
    match system {
        SystemSpec::Pl(_) | SystemSpec::Cantor(_) => piecewise_affine(system, property, xs, ys, delta, mu),
        SystemSpec::Quadratic(q) => smooth(system, q, property, xs, ys, delta, mu),
        _ => Ok(ExpansivityVerdict::undetermined(property, constants(delta, mu), "no decision procedure")),
    }
}

/// Smallest `|f'|` over an interval of a quadratic map.
fn min_abs_derivative(q: &QuadraticFamilyMap, iv: &Interval<Rational>) -> Rational {
    let c = q.critical_point();
    if iv.contains(&c) {
        return int(0);
    }
    let near = if *iv.hi() < c { iv.hi() } else { iv.lo() };
    q.derivatives(near).0.abs()
}

fn smooth(
    system: &SystemSpec,
    q: &QuadraticFamilyMap,
    property: Property,
    xs: &RationalIntervalSet,
    ys: &RationalIntervalSet,
    delta: &Rational,
    mu: &Rational,
) -> Result<ExpansivityVerdict, ExpansivityError> {
    let consts = constants(delta, mu);
    let c = q.critical_point();
    let scale = delta / int(4);
    let mut structured = fold_pairs(system, &c, &scale);
    for k in 0..40 {
        let s = &scale * pow2_neg(k);
        structured.push((c.clone(), &c + &s));
        structured.push((c.clone(), &c - &s));
    }
    for part in xs.parts() {
        for p in [part.lo(), part.hi()] {
            structured.push((p.clone(), int(2) * &c - p));
            for k in 0..20 {
                let h = delta * pow2_neg(k + 1);
                structured.push((p.clone(), p + &h));
                structured.push((p.clone(), p - &h));
            }
        }
    }
    if let Some(cex) = first_violation(system, structured, xs, ys, delta, mu)? {
        return Ok(ExpansivityVerdict::falsified(property, consts, cex, "structured pair search"));
    }

    // every segment [x, y] lies in some part inflated by delta, clipped to the hull of ys
    let dom = q.domain();
    let y_hull = ys.hull();
    let certified = xs.parts().iter().all(|part| {
        let seg = Interval::new(part.lo() - delta, part.hi() + delta)
            .expect("ordered")
            .intersect(&dom)
            .and_then(|s| match &y_hull {
                Some(h) => s.intersect(&Interval::new(
                    std::cmp::min(h.lo(), part.lo()).clone(),
                    std::cmp::max(h.hi(), part.hi()).clone(),
                ).expect("ordered")),
                None => Some(s),
            });
        seg.is_none_or(|s| min_abs_derivative(q, &s) >= *mu)
    });
    if certified {
        return Ok(ExpansivityVerdict::certified(property, consts, "derivative bound on the region"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let denom: i64 = 1 << 20;
    for _ in 0..SAMPLE_PAIRS {
        let Some(x) = sample_set(xs, &mut rng) else { break };
        let off = Rational::new(rng.gen_range(-denom + 1..denom).into(), denom.into()) * delta;
        let y = &x + off;
        if ys.contains(&y) {
            if let Some(cex) = real_violation(system, &x, &y, delta, mu)? {
                return Ok(ExpansivityVerdict::falsified(property, consts, cex, "seeded pair sampling"));
            }
        }
    }
    Ok(ExpansivityVerdict::undetermined(property, consts, "no violation found and no derivative bound"))
}

fn symbolic(
    system: &SystemSpec,
    property: Property,
    region: &RegionSpec,
    delta: &Rational,
    mu: &Rational,
) -> Result<ExpansivityVerdict, ExpansivityError> {
    let consts = constants(delta, mu);
    if matches!(system, SystemSpec::Sft(_)) && *delta <= int(1) && *mu <= int(2) {
        // points closer than 1 share their first symbol, so the shift doubles their distance
        return Ok(ExpansivityVerdict::certified(property, consts, "shift doubles distances below 1"));
    }
    if let (Carrier::Points(ps), Property::Expanding) = (&region.carrier, property) {
        for (i, x) in ps.iter().enumerate() {
            for y in &ps[i + 1..] {
                if let Some(cex) = pair_violation(system, x, y, delta, mu)? {
                    return Ok(ExpansivityVerdict::falsified(property, consts, cex, "finite carrier pairs"));
                }
            }
        }
        return Ok(ExpansivityVerdict::certified(property, consts, "finite carrier pairs"));
    }
    Ok(ExpansivityVerdict::undetermined(property, consts, "no decision procedure"))
}
