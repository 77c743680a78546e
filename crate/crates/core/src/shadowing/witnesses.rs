//! Non-shadowing witnesses and randomized property suites.

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::numerics::{int, pow2_neg, rat, Interval, Rational, RationalIntervalSet};
use crate::pseudo_orbits::{deviation, jumps, sample_set, PseudoOrbit};
use crate::systems::{PiecewiseLinearMap, Point, SLimitSystem, SystemSpec};

use super::{ball_expanding_delta, h_shadow_solve, shadow_oracle, ShadowCertificate, ShadowError, Verdict};

/// Horizon of the critical-orbit recurrence check.
pub const RECURRENCE_HORIZON: usize = 200;
const WITNESS_LENGTH: usize = 60;

#[derive(Clone, Debug)]
pub struct NonshadowWitness {
    pub orbit: PseudoOrbit,
    pub certificate: ShadowCertificate,
    /// `-1` when `x_2` was pushed down, `+1` when pushed up.
    pub side: i8,
    /// `min |T^n(c) - c|` over `0 < n <= RECURRENCE_HORIZON`.
    pub return_distance: Rational,
}

impl NonshadowWitness {
    pub fn is_nonshadowing(&self) -> bool {
        self.certificate.feasible.is_empty()
    }
}

/// `min_{0 < n <= horizon} |T^n(c) - c|` for the tent map, in exact arithmetic.
pub fn critical_return_distance(lambda: &Rational, horizon: usize) -> Result<Rational, ShadowError> {
    let tent = PiecewiseLinearMap::tent(lambda.clone())?;
    let c = rat(1, 2);
    let mut x = c.clone();
    let mut best: Option<Rational> = None;
    for _ in 0..horizon {
        x = tent.eval(&x).expect("tent maps the unit interval into itself");
        let d = (&x - &c).abs();
        if best.as_ref().is_none_or(|b| d < *b) {
            best = Some(d);
        }
    }
    Ok(best.unwrap_or_default())
}

/// Pseudo-orbit through the critical point whose third point is pushed off
/// the critical orbit by `δ/2`, continued as a genuine orbit; both push
/// directions are tried and the first with an empty oracle set is returned.
pub fn nonshadow_witness_tent(
    lambda: &Rational,
    epsilon: &Rational,
    delta: &Rational,
) -> Result<NonshadowWitness, ShadowError> {
    if *lambda <= int(1) || *lambda >= int(2) {
        return Err(ShadowError::Precondition("slope must lie strictly between 1 and 2".into()));
    }
    if *delta < int(0) {
        return Err(ShadowError::Precondition("deflection must be nonnegative".into()));
    }
    let return_distance = critical_return_distance(lambda, RECURRENCE_HORIZON)?;
    if return_distance <= int(2) * epsilon {
        return Err(ShadowError::Precondition(format!(
            "critical orbit returns within {return_distance} of the critical point"
        )));
    }
    let system = SystemSpec::tent(lambda.clone())?;
    let c = rat(1, 2);
    let x1 = system.eval_real(&c)?;
    let x2 = system.eval_real(&x1)?;
    let mut last = None;
    for side in [-1i8, 1] {
        let pushed = &x2 + Rational::from_integer(side.into()) * delta / int(2);
        if pushed < int(0) || pushed > int(1) {
            continue;
        }
        let mut points = vec![Point::Real(c.clone()), Point::Real(x1.clone())];
        points.extend(system.orbit(&Point::Real(pushed), WITNESS_LENGTH - 3)?);
        let orbit = PseudoOrbit::new(points)?.with_delta(delta.clone());
        let certificate = shadow_oracle(&system, &orbit, epsilon)?;
        let witness = NonshadowWitness { orbit, certificate, side, return_distance: return_distance.clone() };
        if witness.is_nonshadowing() {
            return Ok(witness);
        }
        last = Some(witness);
    }
    last.ok_or_else(|| ShadowError::Precondition("both deflections leave the unit interval".into()))
}

/// Grid points of `B̄_ε(x_0)` at spacing `step` whose orbit stays in every
/// closed ε-tube.
pub fn grid_shadowers(
    system: &SystemSpec,
    orbit: &PseudoOrbit,
    epsilon: &Rational,
    step: &Rational,
) -> Result<Vec<Rational>, ShadowError> {
    let xs = super::reals(orbit)?;
    let space = system.space().ok_or(ShadowError::Unsupported(system.kind()))?;
    let mut out = Vec::new();
    let mut y = &xs[0] - epsilon;
    let top = &xs[0] + epsilon;
    while y <= top {
        if space.contains(&y) {
            let mut z = y.clone();
            let mut ok = true;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    z = system.eval_real(&z)?;
                }
                if (&z - x).abs() > *epsilon {
                    ok = false;
                    break;
                }
            }
            if ok {
                out.push(y.clone());
            }
        }
        y += step;
    }
    Ok(out)
}

/// Smallest `N` with `g^N(1/2) = 2^-(2^N) < δ` and `2^-N < δ`.
pub fn slimit_minimal_n(delta: &Rational) -> Result<u32, ShadowError> {
    if *delta <= int(0) {
        return Err(ShadowError::Precondition("delta must be positive".into()));
    }
    // 2^-N < δ already forces 2^-(2^N) <= 2^-N < δ
    (1..=4096).find(|&n| pow2_neg(n) < *delta).ok_or_else(|| ShadowError::Precondition("delta too small".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct SLimitReport {
    pub n: u32,
    #[serde(with = "crate::numerics::rational_serde")]
    pub epsilon: Rational,
    #[serde(with = "crate::numerics::rational_serde")]
    pub delta: Rational,
    #[serde(with = "crate::numerics::vec_rational_serde")]
    pub gamma: Vec<Rational>,
    #[serde(with = "crate::numerics::rational_serde")]
    pub max_jump: Rational,
    /// Every jump is strictly below δ.
    pub pseudo_orbit_ok: bool,
    /// Tail points are fixed, `[0, 1]` is invariant and positively separated
    /// from `-1/2^N`, so only `-1/2^N` itself converges to the tail.
    pub isolation_ok: bool,
    #[serde(with = "crate::numerics::rational_serde")]
    pub separation: Rational,
    #[serde(with = "crate::numerics::rational_serde")]
    pub deviation: Rational,
    #[serde(with = "crate::numerics::rational_serde")]
    pub step0_deviation: Rational,
    /// Deviation is at least `1/2` and exceeds ε.
    pub deviation_ok: bool,
}

impl SLimitReport {
    pub fn passes(&self) -> bool {
        self.pseudo_orbit_ok && self.isolation_ok && self.deviation_ok
    }
}

/// `g^N(1/2)` has a `2^N`-bit denominator.
const MAX_SQUARINGS: u32 = 24;

/// Extra tail points appended after the first `-1/2^N`.
const GAMMA_TAIL: usize = 12;

/// The asymptotic pseudo-orbit `1/2, g(1/2), ..., g^N(1/2), 0, -1/2^N, ...`
/// that no single orbit traces within ε.
pub fn slimit_counterexample_check(
    system: &SLimitSystem,
    n: u32,
    epsilon: &Rational,
    delta: &Rational,
) -> Result<SLimitReport, ShadowError> {
    let cap = system.tail_depth().min(MAX_SQUARINGS);
    if n == 0 || n > cap {
        return Err(ShadowError::Precondition(format!("N must lie in 1..={cap}")));
    }
    let tail = SLimitSystem::tail_point(n);
    let mut gamma = vec![rat(1, 2)];
    for _ in 0..n {
        let x = gamma.last().expect("nonempty");
        gamma.push(x * x);
    }
    let gn = gamma.last().expect("nonempty").clone();
    if gn >= *delta || pow2_neg(n) >= *delta {
        return Err(ShadowError::Precondition(format!("g^N(1/2) < delta and 2^-N < delta fail for N = {n}")));
    }
    gamma.push(int(0));
    gamma.extend(std::iter::repeat_n(tail.clone(), GAMMA_TAIL + 1));

    let spec = SystemSpec::SLimit(system.clone());
    let orbit = PseudoOrbit::from_reals(gamma.clone())?;
    let js = jumps(&spec, &orbit)?;
    let max_jump = js.iter().max().cloned().unwrap_or_default();
    let pseudo_orbit_ok = js.iter().all(|j| j < delta);

    let tails_fixed = (1..=system.tail_depth()).all(|k| {
        let t = SLimitSystem::tail_point(k);
        system.eval(&t).is_ok_and(|y| y == t)
    });
    let unit_invariant = system.eval(&int(0)).is_ok_and(|y| y == int(0))
        && system.eval(&int(1)).is_ok_and(|y| y == int(1));
    let neighbours = [n.checked_sub(1).filter(|&k| k >= 1), Some(n + 1).filter(|&k| k <= system.tail_depth())];
    let separation = neighbours
        .into_iter()
        .flatten()
        .map(|k| (SLimitSystem::tail_point(k) - &tail).abs())
        .chain(std::iter::once(-tail.clone()))
        .min()
        .expect("distance to [0, 1] is always present");
    let isolation_ok = tails_fixed && unit_invariant && separation > int(0);

    let report = deviation(&spec, &Point::Real(tail.clone()), &orbit)?;
    let step0_deviation = report.per_step[0].clone();
    let deviation_ok = report.max_deviation >= rat(1, 2) && report.max_deviation > *epsilon;
    Ok(SLimitReport {
        n,
        epsilon: epsilon.clone(),
        delta: delta.clone(),
        gamma,
        max_jump,
        pseudo_orbit_ok,
        isolation_ok,
        separation,
        deviation: report.max_deviation,
        step0_deviation,
        deviation_ok,
    })
}

/// δ-pseudo-orbit kept inside `region`: each point is drawn from
/// `B̄_{δ(1-2^-10)}(f(x)) ∩ region`; the orbit stops early when that set is empty.
pub fn region_pseudo_orbit<R: Rng + ?Sized>(
    system: &SystemSpec,
    region: &RationalIntervalSet,
    length: usize,
    delta: &Rational,
    rng: &mut R,
) -> Result<PseudoOrbit, ShadowError> {
    let start = sample_set(region, rng).ok_or_else(|| ShadowError::Precondition("empty region".into()))?;
    let radius = delta * (int(1) - pow2_neg(10));
    let mut xs = vec![start];
    while xs.len() < length {
        let image = system.eval_real(xs.last().expect("nonempty"))?;
        let ball = region.intersect_interval(&Interval::ball(&image, &radius));
        match sample_set(&ball, rng) {
            Some(x) => xs.push(x),
            None => break,
        }
    }
    Ok(PseudoOrbit::from_reals(xs)?.with_delta(delta.clone()))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteOutcome {
    pub trials: usize,
    pub failures: usize,
    pub failing_trials: Vec<usize>,
    #[serde(with = "crate::numerics::rational_serde")]
    pub epsilon: Rational,
    #[serde(with = "crate::numerics::rational_serde")]
    pub epsilon_prime: Rational,
    #[serde(with = "crate::numerics::rational_serde")]
    pub delta: Rational,
    pub longest_orbit: usize,
}

/// h-shadows `trials` random region pseudo-orbits at the ball-expanding δ
/// for `(μ, ν, ε)`; a trial fails unless the solver returns an exact-hit
/// witness within ε at every step.
#[allow(clippy::too_many_arguments)]
pub fn ball_expanding_suite(
    system: &SystemSpec,
    region: &RationalIntervalSet,
    mu: &Rational,
    nu: &Rational,
    epsilon: &Rational,
    trials: usize,
    max_len: usize,
    seed: u64,
) -> Result<SuiteOutcome, ShadowError> {
    let (epsilon_prime, delta) = ball_expanding_delta(mu, nu, epsilon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SuiteOutcome {
        trials,
        epsilon: epsilon.clone(),
        epsilon_prime,
        delta: delta.clone(),
        ..SuiteOutcome::default()
    };
    for t in 0..trials {
        let len = rng.gen_range(2..=max_len.max(2));
        let orbit = region_pseudo_orbit(system, region, len, &delta, &mut rng)?;
        out.longest_orbit = out.longest_orbit.max(orbit.len());
        let cert = h_shadow_solve(system, &orbit, epsilon)?;
        let ok = cert.verdict == Verdict::Yes
            && cert.report.as_ref().is_some_and(|r| r.exact_hit && r.max_deviation <= *epsilon);
        if !ok {
            out.failures += 1;
            out.failing_trials.push(t);
        }
    }
    Ok(out)
}
