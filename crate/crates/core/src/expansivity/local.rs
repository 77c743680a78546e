//! Openness, local injectivity and positive expansivity, and re-evaluation
//! of every kind of counterexample.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{format_rational, int, pow2_neg, pow3_neg, Interval, Rational, RationalIntervalSet};
use crate::pseudo_orbits::{sample_ball, sample_set};
use crate::systems::{distance, CantorSystem, OdometerSystem, Point, SystemSpec};

use super::balls::{ball_gap, cantor_gap};
use super::pairs::{fold_pairs, pair_violation};
use super::{
    carrier_set, check_positive, interval_image, space_hull, Constants, Counterexample, ExpansivityError,
    ExpansivityVerdict, Holds, Property, RegionSpec,
};

const RANDOM_PAIRS: usize = 512;

/// Whether nearby values on each side of `x` lie above (`1`) or below (`-1`) `f(x)`;
/// `None` for a side outside the space.
fn sides(system: &SystemSpec, x: &Rational) -> Result<(Option<i8>, Option<i8>), ExpansivityError> {
    let sign = |s: &Rational| if s.is_positive() { 1 } else { -1 };
    match system {
        SystemSpec::Pl(f) => {
            let i = f.piece_index(x).ok_or_else(|| ExpansivityError::Precondition(format!("{x} is outside [0, 1]")))?;
            let slopes = f.slopes();
            let at_break = f.breakpoints()[i] == *x;
            let left = if x.is_zero() {
                None
            } else {
                let j = if at_break { i - 1 } else { i };
                Some(-sign(&slopes[j]))
            };
            let right = if *x == int(1) { None } else { Some(sign(&slopes[i])) };
            Ok((left, right))
        }
        SystemSpec::Quadratic(q) => {
            let dom = q.domain();
            if !dom.contains(x) {
                return Err(ExpansivityError::Precondition(format!("{x} is outside the domain")));
            }
            let d = q.derivatives(x).0;
            let (left, right) = if d.is_zero() { (Some(-1), Some(-1)) } else { (Some(-sign(&d)), Some(sign(&d))) };
            Ok(((x != dom.lo()).then_some(left).flatten(), (x != dom.hi()).then_some(right).flatten()))
        }
        other => Err(ExpansivityError::Unsupported(other.kind())),
    }
}

/// A radius on which `f` is monotone on each side of `x`.
fn side_radius(system: &SystemSpec, x: &Rational) -> Rational {
    let mut others: Vec<Rational> = match system {
        SystemSpec::Pl(f) => f.breakpoints().to_vec(),
        _ => system.critical_reals(),
    };
    others.retain(|b| b != x);
    others
        .iter()
        .map(|b| (b - x).abs() / int(2))
        .min()
        .map_or(int(1), |r| std::cmp::min(r, int(1)))
}

/// Openness of `f` at one point, relative to the space.
pub fn check_open_at(system: &SystemSpec, x: &Point) -> Result<ExpansivityVerdict, ExpansivityError> {
    let property = Property::OpenOn;
    let x = x
        .real()
        .ok_or(ExpansivityError::Unsupported(system.kind()))?
        .clone();
    if let SystemSpec::Cantor(c) = system {
        return Ok(match cantor_not_open(c, &x)? {
            Some(cex) => ExpansivityVerdict::falsified(property, Constants::default(), cex, "value 0 reached from one side"),
            None => ExpansivityVerdict::certified(property, Constants::default(), "affine piece onto a clopen set"),
        });
    }
    let hull = space_hull(system).ok_or(ExpansivityError::Unsupported(system.kind()))?;
    let fx = system.eval_real(&x)?;
    let (left, right) = sides(system, &x)?;
    let above = left == Some(1) || right == Some(1) || fx == *hull.hi();
    let below = left == Some(-1) || right == Some(-1) || fx == *hull.lo();
    if above && below {
        return Ok(ExpansivityVerdict::certified(property, Constants::default(), "one-sided monotonicity"));
    }
    let r = side_radius(system, &x);
    let ball = Interval::ball(&x, &r).intersect(&hull).expect("x lies in the space");
    let img = interval_image(system, &ball)?;
    let cex = Counterexample {
        inequality: format!(
            "f(B(x, r)) = {img} has f(x) = {} as an endpoint inside the space",
            format_rational(&fx)
        ),
        x: Point::Real(x),
        y: Point::Real(fx),
        radius: Some(r.clone()),
        horizon: None,
        quantity: r,
    };
    Ok(ExpansivityVerdict::falsified(property, Constants::default(), cex, "one-sided monotonicity"))
}

fn cantor_not_open(c: &CantorSystem, x: &Rational) -> Result<Option<Counterexample>, ExpansivityError> {
    let fx = c.eval(x)?;
    if !fx.is_zero() {
        return Ok(None);
    }
    let r = if x.is_zero() { pow3_neg(3) } else { pow3_neg(2) };
    let img = c.image(&c.space().intersect_interval(&Interval::ball(x, &r)));
    let near = int(2) * pow3_neg(c.depth().saturating_sub(2).max(1));
    let y = if img.leftmost().is_some_and(|l| *l >= int(0)) { -near } else { near };
    Ok(Some(Counterexample {
        inequality: format!("f(X ∩ B(x, r)) = {img} lies on one side of f(x) = 0; {} is on the other", format_rational(&y)),
        x: Point::Real(x.clone()),
        y: Point::Real(y),
        radius: Some(r.clone()),
        horizon: None,
        quantity: r,
    }))
}

/// Points of the carrier where openness can fail: turning points and the
/// ends of the space.
fn open_candidates(system: &SystemSpec, carrier: &RationalIntervalSet) -> Vec<Rational> {
    let mut xs = match system {
        SystemSpec::Cantor(_) => vec![int(0), Rational::new(2.into(), 3.into()), Rational::new((-2).into(), 3.into())],
        _ => {
            let mut v = system.critical_reals();
            if let Some(h) = space_hull(system) {
                v.push(h.lo().clone());
                v.push(h.hi().clone());
            }
            v
        }
    };
    xs.retain(|x| carrier.contains(x));
    xs
}

/// Openness at every point of the carrier.
pub fn check_open_on(system: &SystemSpec, region: &RegionSpec) -> Result<ExpansivityVerdict, ExpansivityError> {
    let carrier = carrier_set(system, region)?;
    for x in open_candidates(system, &carrier) {
        let v = check_open_at(system, &Point::Real(x))?;
        if v.is_falsified() {
            return Ok(v);
        }
    }
    Ok(ExpansivityVerdict::certified(Property::OpenOn, Constants::default(), "all turning points and ends checked"))
}

pub fn check_locally_injective(
    system: &SystemSpec,
    region: &RegionSpec,
) -> Result<ExpansivityVerdict, ExpansivityError> {
    let property = Property::LocallyInjective;
    let radius = |d: Rational| Constants { delta: Some(d), ..Constants::default() };
    match system {
        SystemSpec::Sft(_) | SystemSpec::Odometer(_) => {
            return Ok(ExpansivityVerdict::certified(property, radius(int(1)), "injective on cylinders of length one"));
        }
        SystemSpec::Cantor(c) => {
            return Ok(ExpansivityVerdict::certified(
                property,
                radius(pow3_neg(c.depth())),
                "balls of this radius meet one piece",
            ));
        }
        SystemSpec::SLimit(_) => {
            return Ok(ExpansivityVerdict::undetermined(property, Constants::default(), "no decision procedure"));
        }
        _ => {}
    }
    let carrier = carrier_set(system, region)?;
    let crit = system.critical_reals();
    if let Some(c) = crit.iter().find(|c| carrier.contains(c)) {
        let scale = side_radius(system, c) / int(2);
        let (x, y) = fold_pairs(system, c, &scale).into_iter().next().expect("a turning point has a fold");
        let r = std::cmp::max((&x - c).abs(), (&y - c).abs());
        let cex = Counterexample {
            inequality: format!("f(x) = f(y) = {} with x != y within {} of x0", format_rational(&system.eval_real(&x)?), format_rational(&r)),
            x: Point::Real(x),
            y: Point::Real(y),
            radius: Some(r),
            horizon: None,
            quantity: c.clone(),
        };
        return Ok(ExpansivityVerdict::falsified(property, Constants::default(), cex, "critical point in the region"));
    }
    let d = crit.iter().filter_map(|c| carrier.distance_to(c)).min().unwrap_or_else(|| int(1));
    Ok(ExpansivityVerdict::certified(property, radius(d), "region avoids the critical set"))
}

fn random_point(system: &SystemSpec, rng: &mut ChaCha8Rng) -> Option<Point> {
    match system {
        SystemSpec::Sft(s) => s.extend_random(&[], 16, &s.live_states(), rng).map(Point::Seq),
        SystemSpec::Odometer(o) => Some(Point::Word((0..o.depth()).map(|_| rng.gen_range(0..2)).collect())),
        _ => sample_set(&system.space()?, rng).map(Point::Real),
    }
}

/// Supremum of `d(f^n(x), f^n(y))` over all `n`, provided the pair orbit
/// merges or revisits an earlier pair within `horizon` steps; then the
/// supremum is attained before that step. Also returns the step.
fn closed_spread(
    system: &SystemSpec,
    x: &Point,
    y: &Point,
    horizon: usize,
) -> Result<Option<(Rational, usize)>, ExpansivityError> {
    if let SystemSpec::Odometer(_) = system {
        // adding one preserves distances
        return Ok(Some((distance(x, y)?, 0)));
    }
    let mut seen: Vec<(Point, Point)> = Vec::new();
    let (mut a, mut b) = (x.clone(), y.clone());
    let mut worst = int(0);
    for n in 0..=horizon {
        if a == b || seen.iter().any(|(p, q)| *p == a && *q == b) {
            return Ok(Some((worst, n)));
        }
        worst = std::cmp::max(worst, distance(&a, &b)?);
        let next = (system.eval(&a)?, system.eval(&b)?);
        seen.push((a, b));
        (a, b) = next;
    }
    Ok(None)
}

fn spread_counterexample(
    system: &SystemSpec,
    x: Point,
    y: Point,
    b: &Rational,
    horizon: usize,
) -> Result<Option<Counterexample>, ExpansivityError> {
    if x == y {
        return Ok(None);
    }
    let Some((spread, closed)) = closed_spread(system, &x, &y, horizon)? else { return Ok(None) };
    if spread >= *b {
        return Ok(None);
    }
    Ok(Some(Counterexample {
        inequality: format!(
            "sup over n of d(f^n(x), f^n(y)) = {} < b; the pair orbit closes up at step {closed}",
            format_rational(&spread)
        ),
        x,
        y,
        radius: None,
        horizon: Some(closed),
        quantity: spread,
    }))
}

/// Enough steps for the greedy shift points to cycle.
const SHIFT_HORIZON: usize = 1 << 12;

/// Searches for distinct points whose orbits stay within `b` up to `horizon`.
pub fn positively_expansive_falsify(
    system: &SystemSpec,
    b: &Rational,
    horizon: usize,
    seed: u64,
) -> Result<ExpansivityVerdict, ExpansivityError> {
    check_positive("b", b)?;
    if horizon == 0 {
        return Err(ExpansivityError::Precondition("horizon must be at least 1".into()));
    }
    let property = Property::PositivelyExpansive;
    let consts = Constants { b: Some(b.clone()), ..Constants::default() };
    let mut structured: Vec<(Point, Point)> = Vec::new();
    for c in system.critical_reals() {
        for (x, y) in fold_pairs(system, &c, &(b / int(4))) {
            structured.push((Point::Real(x), Point::Real(y)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if system.is_piecewise_affine() {
        // distinct preimages of one value merge after a single step
        for _ in 0..64 {
            let Some(Point::Real(v)) = random_point(system, &mut rng) else { break };
            let pre = system.point_preimages(&v)?;
            for w in pre.windows(2) {
                structured.push((Point::Real(w[0].clone()), Point::Real(w[1].clone())));
            }
        }
    }
    for (x, y) in structured {
        if let Some(cex) = spread_counterexample(system, x, y, b, horizon)? {
            return Ok(ExpansivityVerdict::falsified(property, consts, cex, "structured pairs"));
        }
    }
    for _ in 0..RANDOM_PAIRS {
        let Some(x) = random_point(system, &mut rng) else { break };
        let r = b * pow2_neg(rng.gen_range(1..24));
        let Ok(y) = sample_ball(system, &x, &r, &mut rng) else { continue };
        if let Some(cex) = spread_counterexample(system, x, y, b, horizon)? {
            return Ok(ExpansivityVerdict::falsified(property, consts, cex, "seeded pairs"));
        }
    }
    Ok(ExpansivityVerdict::undetermined(property, consts, "no pair found; the property is not certifiable by search"))
}

/// Exact answer for shift spaces and the odometer: sequences first
/// disagreeing at index `k` are at distance 1 after `k` shifts, while the
/// odometer preserves distances.
pub fn shift_positively_expansive(system: &SystemSpec, b: &Rational) -> Result<ExpansivityVerdict, ExpansivityError> {
    check_positive("b", b)?;
    let property = Property::PositivelyExpansive;
    let consts = Constants { b: Some(b.clone()), ..Constants::default() };
    match system {
        SystemSpec::Sft(s) => {
            if *b <= int(1) {
                return Ok(ExpansivityVerdict::certified(property, consts, "first disagreement reaches distance 1"));
            }
            let live = s.live_states();
            let pts: Vec<_> = (0..s.symbols()).filter_map(|a| s.extend_greedy(&[a], &live)).collect();
            if pts.len() < 2 {
                return Ok(ExpansivityVerdict::certified(property, consts, "the space is a single point"));
            }
            let (x, y) = (Point::Seq(pts[0].clone()), Point::Seq(pts[1].clone()));
            let cex = spread_counterexample(system, x, y, b, SHIFT_HORIZON)?.expect("eventually periodic points");
            Ok(ExpansivityVerdict::falsified(property, consts, cex, "every distance is below b"))
        }
        SystemSpec::Odometer(o) => {
            let k = (0..o.depth()).find(|&k| pow2_neg(k as u32) < *b);
            let Some(k) = k else {
                return Ok(ExpansivityVerdict::certified(property, consts, "distinct words are at least b apart"));
            };
            let x = OdometerSystem::from_int(0, o.depth());
            let mut y = x.clone();
            y[k] = 1;
            let cex = spread_counterexample(system, Point::Word(x), Point::Word(y), b, 1)?.expect("isometry");
            Ok(ExpansivityVerdict::falsified(property, consts, cex, "the odometer is an isometry"))
        }
        other => Err(ExpansivityError::Unsupported(other.kind())),
    }
}

pub(super) fn revalidate(
    system: &SystemSpec,
    property: Property,
    consts: &Constants,
    cex: &Counterexample,
) -> Result<bool, ExpansivityError> {
    let need = |r: &Option<Rational>| r.clone().ok_or_else(|| ExpansivityError::Precondition("missing constant".into()));
    let real = |p: &Point| p.real().cloned().ok_or_else(|| ExpansivityError::Precondition("real point expected".into()));
    match property {
        Property::Expanding | Property::Star => {
            Ok(pair_violation(system, &cex.x, &cex.y, &need(&consts.delta)?, &need(&consts.mu)?)?.is_some())
        }
        Property::BallExpanding => {
            let (x, eps, mu) = (real(&cex.x)?, need(&cex.radius)?, need(&consts.mu)?);
            if let Some(nu) = &consts.nu {
                if eps >= *nu || eps <= int(0) {
                    return Ok(false);
                }
            }
            match system {
                SystemSpec::Cantor(c) => Ok(cantor_gap(c, &x, &eps, &mu)?.is_some()),
                _ => {
                    let hull = space_hull(system).ok_or(ExpansivityError::Unsupported(system.kind()))?;
                    Ok(ball_gap(system, &hull, &x, &eps, &mu)?.is_some())
                }
            }
        }
        Property::OpenOn => {
            let (x, y, r) = (real(&cex.x)?, real(&cex.y)?, need(&cex.radius)?);
            match system {
                SystemSpec::Cantor(c) => {
                    let img = c.image(&c.space().intersect_interval(&Interval::ball(&x, &r)));
                    let fx = c.eval(&x)?;
                    let above = img.parts().iter().all(|p| *p.lo() >= fx);
                    let below = img.parts().iter().all(|p| *p.hi() <= fx);
                    Ok(fx.is_zero() && c.space().contains(&y) && ((above && y < fx) || (below && y > fx)))
                }
                _ => {
                    let hull = space_hull(system).ok_or(ExpansivityError::Unsupported(system.kind()))?;
                    let ball = Interval::ball(&x, &r).intersect(&hull).expect("x in space");
                    let img = interval_image(system, &ball)?;
                    let fx = system.eval_real(&x)?;
                    let stuck_low = *img.lo() == fx && fx != *hull.lo();
                    let stuck_high = *img.hi() == fx && fx != *hull.hi();
                    Ok(r > int(0) && (stuck_low || stuck_high))
                }
            }
        }
        Property::LocallyInjective => {
            let (x, y) = (real(&cex.x)?, real(&cex.y)?);
            let r = need(&cex.radius)?;
            Ok(x != y
                && system.eval_real(&x)? == system.eval_real(&y)?
                && (&x - &cex.quantity).abs() <= r
                && (&y - &cex.quantity).abs() <= r)
        }
        Property::PositivelyExpansive => {
            let horizon = cex.horizon.unwrap_or(1);
            let spread = closed_spread(system, &cex.x, &cex.y, horizon)?;
            let b = need(&consts.b)?;
            Ok(cex.x != cex.y && spread.is_some_and(|(s, _)| s < b))
        }
    }
}

impl ExpansivityVerdict {
    /// Holds value only, for compact reporting.
    pub fn holds_label(&self) -> &'static str {
        match self.holds {
            Holds::Certified => "certified",
            Holds::Falsified => "falsified",
            Holds::Undetermined => "undetermined",
        }
    }
}
