//! Construction, perturbation, splicing and verification of pseudo-orbits.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::numerics::{
    format_rational, int, parse_rational, pow2_neg, round_down, round_up, Interval, Rational, RationalIntervalSet,
};
use crate::systems::{distance, OdometerSystem, Point, SystemError, SystemSpec};

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("empty pseudo-orbit")]
    Empty,
    #[error("jump bound must be positive")]
    NonPositiveDelta,
    #[error("ball around {0} misses the space")]
    EmptyBall(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("malformed pseudo-orbit file: {0}")]
    Format(String),
}

/// Jump bounds for an asymptotic pseudo-orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DecaySchedule {
    /// `scale * 2^-(n+1)`.
    Geometric {
        #[serde(with = "crate::numerics::rational_serde")]
        scale: Rational,
    },
    /// Explicit bounds, the last one repeated.
    Explicit {
        #[serde(with = "crate::numerics::vec_rational_serde")]
        bounds: Vec<Rational>,
    },
}

impl DecaySchedule {
    pub fn bound(&self, n: usize) -> Rational {
        match self {
            DecaySchedule::Geometric { scale } => scale * pow2_neg(n as u32 + 1),
            DecaySchedule::Explicit { bounds } => {
                bounds.get(n).or(bounds.last()).cloned().unwrap_or_else(Rational::zero)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PseudoOrbit {
    pub points: Vec<Point>,
    pub claimed_delta: Option<Rational>,
    pub schedule: Option<DecaySchedule>,
}

impl PseudoOrbit {
    pub fn new(points: Vec<Point>) -> Result<Self, OrbitError> {
        if points.is_empty() {
            return Err(OrbitError::Empty);
        }
        Ok(Self { points, claimed_delta: None, schedule: None })
    }

    pub fn from_reals(xs: impl IntoIterator<Item = Rational>) -> Result<Self, OrbitError> {
        Self::new(xs.into_iter().map(Point::Real).collect())
    }

    pub fn with_delta(mut self, delta: Rational) -> Self {
        self.claimed_delta = Some(delta);
        self
    }

    pub fn with_schedule(mut self, schedule: DecaySchedule) -> Self {
        self.schedule = Some(schedule);
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the last point.
    pub fn last_index(&self) -> usize {
        self.points.len() - 1
    }

    pub fn last(&self) -> &Point {
        self.points.last().expect("nonempty")
    }

    pub fn reals(&self) -> Option<Vec<Rational>> {
        self.points.iter().map(|p| p.real().cloned()).collect()
    }
}

/// Per-step distances `d(f(x_i), x_{i+1})`.
pub fn jumps(system: &SystemSpec, orbit: &PseudoOrbit) -> Result<Vec<Rational>, OrbitError> {
    if orbit.is_empty() {
        return Err(OrbitError::Empty);
    }
    orbit
        .points
        .windows(2)
        .map(|w| Ok(distance(&system.eval(&w[0])?, &w[1])?))
        .collect()
}

/// Largest jump `max d(f(x_i), x_{i+1})`, zero for a genuine orbit.
pub fn verify_jumps(system: &SystemSpec, orbit: &PseudoOrbit) -> Result<Rational, OrbitError> {
    Ok(jumps(system, orbit)?.into_iter().max().unwrap_or_else(Rational::zero))
}

/// Checks the claimed bound (closed) and the decay schedule at every index.
pub fn validate(system: &SystemSpec, orbit: &PseudoOrbit) -> Result<bool, OrbitError> {
    let js = jumps(system, orbit)?;
    let delta_ok = match &orbit.claimed_delta {
        Some(d) => js.iter().all(|j| j <= d),
        None => true,
    };
    let schedule_ok = match &orbit.schedule {
        Some(s) => js.iter().enumerate().all(|(n, j)| *j <= s.bound(n)),
        None => true,
    };
    Ok(delta_ok && schedule_ok)
}

/// Genuine orbit segment of length `len` (that is, `len` points).
pub fn true_orbit(system: &SystemSpec, x0: &Point, len: usize) -> Result<PseudoOrbit, OrbitError> {
    if len == 0 {
        return Err(OrbitError::Empty);
    }
    let pts = system.orbit(x0, len - 1)?;
    Ok(PseudoOrbit::new(pts)?.with_delta(int(0)))
}

/// Near-uniform dyadic sample from a set of positive measure, or a uniformly chosen
/// component endpoint when the set is a finite collection of points.
pub fn sample_set<R: Rng + ?Sized>(set: &RationalIntervalSet, rng: &mut R) -> Option<Rational> {
    if set.is_empty() {
        return None;
    }
    let total = set.measure();
    if total.is_zero() {
        let i = rng.gen_range(0..set.parts().len());
        return Some(set.parts()[i].lo().clone());
    }
    let resolution = 40;
    let u = Rational::new(BigInt::from(rng.gen_range(0u64..(1u64 << resolution))), BigInt::one() << resolution);
    let mut t = u * &total;
    for p in set.parts() {
        let len = p.len();
        if t <= len {
            return Some(snap(p, p.lo() + t));
        }
        t -= len;
    }
    set.rightmost().cloned()
}

/// Nearest-below point of the `2^-SAMPLE_BITS` grid inside `p`, else the
/// nearest-above one, else `x` itself. Keeps sampled numbers short so exact
/// orbit arithmetic does not compound denominators.
fn snap(p: &Interval<Rational>, x: Rational) -> Rational {
    let down = round_down(&x, SAMPLE_BITS);
    if p.contains(&down) {
        return down;
    }
    let up = round_up(&x, SAMPLE_BITS);
    if p.contains(&up) {
        up
    } else {
        x
    }
}

const SAMPLE_BITS: u32 = 48;

/// Number of leading symbols two sequences must share to be within `radius`.
pub fn prefix_for_radius(radius: &Rational) -> usize {
    let mut k = 0;
    while pow2_neg(k as u32) > *radius {
        k += 1;
    }
    k
}

/// Random point of `B̄_radius(center) ∩ space`.
pub fn sample_ball<R: Rng + ?Sized>(
    system: &SystemSpec,
    center: &Point,
    radius: &Rational,
    rng: &mut R,
) -> Result<Point, OrbitError> {
    match (system, center) {
        (SystemSpec::Odometer(o), Point::Word(w)) => {
            let k = prefix_for_radius(radius).min(o.depth());
            let mut out = w.clone();
            for s in out.iter_mut().skip(k) {
                *s = rng.gen_range(0..2);
            }
            Ok(Point::Word(out))
        }
        (SystemSpec::Sft(s), Point::Seq(p)) => {
            let k = prefix_for_radius(radius);
            let live = s.live_states();
            s.extend_random(&p.prefix(k), 8, &live, rng)
                .map(Point::Seq)
                .ok_or_else(|| OrbitError::EmptyBall(p.format(s.alphabet())))
        }
        (_, Point::Real(c)) => {
            let space = system.space().ok_or(SystemError::MixedPoints)?;
            let ball = space.intersect_interval(&Interval::ball(c, radius));
            sample_set(&ball, rng)
                .map(Point::Real)
                .ok_or_else(|| OrbitError::EmptyBall(format_rational(c)))
        }
        _ => Err(SystemError::MixedPoints.into()),
    }
}

/// Seeded random δ-pseudo-orbit: each point drawn from the closed ball of
/// radius `delta * (1 - 2^-10)` around the image of its predecessor.
pub fn perturbed_orbit(
    system: &SystemSpec,
    x0: &Point,
    length: usize,
    delta: &Rational,
    seed: u64,
) -> Result<PseudoOrbit, OrbitError> {
    if *delta <= int(0) {
        return Err(OrbitError::NonPositiveDelta);
    }
    if length == 0 {
        return Err(OrbitError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = delta * (int(1) - pow2_neg(10));
    let mut pts = vec![x0.clone()];
    while pts.len() < length {
        let image = system.eval(pts.last().expect("nonempty"))?;
        pts.push(sample_ball(system, &image, &radius, &mut rng)?);
    }
    Ok(PseudoOrbit::new(pts)?.with_delta(delta.clone()))
}

/// Seeded asymptotic pseudo-orbit: jump `n` is drawn with radius
/// `schedule.bound(n) * (1 - 2^-10)`.
pub fn scheduled_orbit(
    system: &SystemSpec,
    x0: &Point,
    length: usize,
    schedule: &DecaySchedule,
    seed: u64,
) -> Result<PseudoOrbit, OrbitError> {
    if length == 0 {
        return Err(OrbitError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shrink = int(1) - pow2_neg(10);
    let mut pts = vec![x0.clone()];
    while pts.len() < length {
        let radius = schedule.bound(pts.len() - 1) * &shrink;
        if radius <= int(0) {
            return Err(OrbitError::NonPositiveDelta);
        }
        let image = system.eval(pts.last().expect("nonempty"))?;
        pts.push(sample_ball(system, &image, &radius, &mut rng)?);
    }
    Ok(PseudoOrbit::new(pts)?.with_schedule(schedule.clone()))
}

/// Shadowing deviation of the orbit of `y` from a pseudo-orbit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationReport {
    #[serde(with = "crate::numerics::rational_serde")]
    pub max_deviation: Rational,
    #[serde(with = "crate::numerics::vec_rational_serde")]
    pub per_step: Vec<Rational>,
    pub exact_hit: bool,
}

pub fn deviation(system: &SystemSpec, y: &Point, orbit: &PseudoOrbit) -> Result<DeviationReport, OrbitError> {
    if orbit.is_empty() {
        return Err(OrbitError::Empty);
    }
    let ys = system.orbit(y, orbit.last_index())?;
    let per_step = ys
        .iter()
        .zip(&orbit.points)
        .map(|(a, b)| distance(a, b))
        .collect::<Result<Vec<_>, _>>()?;
    let exact_hit = ys.last() == orbit.points.last();
    let max_deviation = per_step.iter().max().cloned().unwrap_or_else(Rational::zero);
    Ok(DeviationReport { max_deviation, per_step, exact_hit })
}

/// `prefix ++ suffix`, with the jump bound recomputed.
pub fn splice(system: &SystemSpec, prefix: &[Point], suffix: &PseudoOrbit) -> Result<PseudoOrbit, OrbitError> {
    let mut pts = prefix.to_vec();
    pts.extend(suffix.points.iter().cloned());
    let mut out = PseudoOrbit::new(pts)?;
    let delta = verify_jumps(system, &out)?;
    out.claimed_delta = Some(delta);
    out.schedule = if prefix.is_empty() { suffix.schedule.clone() } else { None };
    Ok(out)
}

/// Every `n`-th point starting at `start`.
pub fn downsample(orbit: &PseudoOrbit, n: usize, start: usize) -> Result<PseudoOrbit, OrbitError> {
    PseudoOrbit::new(orbit.points.iter().skip(start).step_by(n.max(1)).cloned().collect())
}

/// Inverse odometer iterate, used for the exact-hit construction.
pub fn odometer_back(o: &OdometerSystem, w: &[u8], steps: usize) -> Vec<u8> {
    o.iterate(w, -(steps as i64))
}

pub fn to_csv(system: &SystemSpec, orbit: &PseudoOrbit) -> Result<String, OrbitError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| OrbitError::Format(e.to_string());
    w.write_record(["point"]).map_err(io)?;
    for p in &orbit.points {
        w.write_record([system.format_point(p)]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| OrbitError::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| OrbitError::Format(e.to_string()))
}

pub fn from_csv(system: &SystemSpec, text: &str) -> Result<PseudoOrbit, OrbitError> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let mut pts = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| OrbitError::Format(e.to_string()))?;
        let field = rec.get(0).unwrap_or("").trim();
        if (i == 0 && field == "point") || field.is_empty() {
            continue;
        }
        pts.push(system.parse_point(field)?);
    }
    PseudoOrbit::new(pts)
}

pub fn to_json(system: &SystemSpec, orbit: &PseudoOrbit) -> Value {
    json!({
        "claimedDelta": orbit.claimed_delta.as_ref().map(format_rational),
        "schedule": orbit.schedule,
        "points": orbit.points.iter().map(|p| system.format_point(p)).collect::<Vec<_>>(),
    })
}

pub fn from_json(system: &SystemSpec, v: &Value) -> Result<PseudoOrbit, OrbitError> {
    let bad = |m: &str| OrbitError::Format(m.to_string());
    let points = v
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing points"))?
        .iter()
        .map(|p| {
            let s = p.as_str().ok_or_else(|| bad("points must be strings"))?;
            Ok(system.parse_point(s)?)
        })
        .collect::<Result<Vec<_>, OrbitError>>()?;
    let mut orbit = PseudoOrbit::new(points)?;
    if let Some(d) = v.get("claimedDelta").or_else(|| v.get("claimed_delta")).and_then(Value::as_str) {
        orbit.claimed_delta = Some(parse_rational(d).map_err(|e| bad(&e.to_string()))?);
    }
    if let Some(s) = v.get("schedule").filter(|s| !s.is_null()) {
        orbit.schedule = Some(serde_json::from_value(s.clone()).map_err(|e| bad(&e.to_string()))?);
    }
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;
    use crate::systems::{SLimitSystem, ShiftSystem};
    use proptest::prelude::*;

    fn t2() -> SystemSpec {
        SystemSpec::tent(int(2)).unwrap()
    }

    fn reals(xs: &[Rational]) -> PseudoOrbit {
        PseudoOrbit::from_reals(xs.iter().cloned()).unwrap()
    }

    #[test]
    fn jump_examples() {
        let s = t2();
        assert_eq!(verify_jumps(&s, &reals(&[rat(1, 3), rat(2, 3), rat(2, 3), rat(2, 3)])).unwrap(), int(0));
        assert_eq!(verify_jumps(&s, &reals(&[rat(1, 4), rat(51, 100)])).unwrap(), rat(1, 100));
        assert!(matches!(jumps(&s, &PseudoOrbit { points: vec![], claimed_delta: None, schedule: None }), Err(OrbitError::Empty)));
    }

    #[test]
    fn scheduled_orbit_respects_schedule() {
        let s = t2();
        let schedule = DecaySchedule::Geometric { scale: rat(1, 10) };
        for seed in 0..20 {
            let o = scheduled_orbit(&s, &Point::Real(rat(1, 3)), 12, &schedule, seed).unwrap();
            assert_eq!(o.len(), 12);
            assert!(validate(&s, &o).unwrap());
        }
    }

    #[test]
    fn slimit_gamma_is_small_jump() {
        let n = 4u32;
        let sys = SystemSpec::SLimit(SLimitSystem::new(8).unwrap());
        let mut pts = vec![rat(1, 2)];
        for _ in 0..n {
            let x = pts.last().unwrap();
            pts.push(x * x);
        }
        pts.push(int(0));
        pts.extend(std::iter::repeat_n(-pow2_neg(n), 5));
        let delta = rat(1, 10);
        assert!(verify_jumps(&sys, &reals(&pts)).unwrap() < delta);
    }

    #[test]
    fn perturbed_orbit_contract() {
        let s = t2();
        assert!(matches!(perturbed_orbit(&s, &Point::Real(rat(1, 3)), 5, &int(0), 1), Err(OrbitError::NonPositiveDelta)));
        let d = rat(1, 100);
        let a = perturbed_orbit(&s, &Point::Real(rat(1, 3)), 50, &d, 9).unwrap();
        let b = perturbed_orbit(&s, &Point::Real(rat(1, 3)), 50, &d, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        assert!(verify_jumps(&s, &a).unwrap() < d);
    }

    #[test]
    fn deviation_examples() {
        let s = t2();
        let orbit = true_orbit(&s, &Point::Real(rat(1, 7)), 6).unwrap();
        let r = deviation(&s, &Point::Real(rat(1, 7)), &orbit).unwrap();
        assert_eq!(r.max_deviation, int(0));
        assert!(r.exact_hit);
        let r = deviation(&s, &Point::Real(int(0)), &reals(&[int(0), rat(1, 10)])).unwrap();
        assert_eq!(r.per_step, vec![int(0), rat(1, 10)]);
        assert!(!r.exact_hit);
    }

    #[test]
    fn slimit_tail_witness_deviation() {
        let n = 4u32;
        let sys = SystemSpec::SLimit(SLimitSystem::new(8).unwrap());
        let gamma = reals(&[rat(1, 2), rat(1, 4), rat(1, 16), rat(1, 256), rat(1, 65536), int(0), -pow2_neg(n)]);
        let r = deviation(&sys, &Point::Real(-pow2_neg(n)), &gamma).unwrap();
        assert_eq!(r.per_step[0], rat(1, 2) + pow2_neg(n));
        assert!(r.per_step[0] > rat(1, 4));
    }

    #[test]
    fn splice_identity_and_bound() {
        let s = t2();
        let o = perturbed_orbit(&s, &Point::Real(rat(1, 5)), 10, &rat(1, 50), 4).unwrap();
        let same = splice(&s, &[], &o).unwrap();
        assert_eq!(same.points, o.points);
        let head = true_orbit(&s, &Point::Real(rat(1, 9)), 3).unwrap();
        let tail_start = s.eval(head.last()).unwrap();
        let shifted = match tail_start {
            Point::Real(x) => Point::Real(x + rat(1, 200)),
            _ => unreachable!(),
        };
        let tail = true_orbit(&s, &shifted, 4).unwrap();
        let joined = splice(&s, &head.points, &tail).unwrap();
        assert!(joined.claimed_delta.unwrap() <= rat(1, 200));
    }

    #[test]
    fn csv_and_json_roundtrip() {
        let s = t2();
        let o = perturbed_orbit(&s, &Point::Real(rat(1, 5)), 6, &rat(1, 50), 4).unwrap()
            .with_schedule(DecaySchedule::Geometric { scale: rat(1, 10) });
        let csv = to_csv(&s, &o).unwrap();
        assert!(csv.starts_with("point\n"));
        assert_eq!(from_csv(&s, &csv).unwrap().points, o.points);
        let back = from_json(&s, &to_json(&s, &o)).unwrap();
        assert_eq!(back, o);
        let g = SystemSpec::Sft(ShiftSystem::golden_mean());
        let p = perturbed_orbit(&g, &g.parse_point("0(10)").unwrap(), 5, &rat(1, 4), 2).unwrap();
        assert_eq!(from_csv(&g, &to_csv(&g, &p).unwrap()).unwrap().points, p.points);
    }

    #[test]
    fn geometric_schedule() {
        let s = DecaySchedule::Geometric { scale: int(1) };
        assert_eq!(s.bound(0), rat(1, 2));
        assert_eq!(s.bound(3), rat(1, 16));
    }

    #[test]
    fn symbolic_perturbations_stay_admissible() {
        let g = SystemSpec::Sft(ShiftSystem::golden_mean());
        let o = perturbed_orbit(&g, &g.parse_point("(0)").unwrap(), 30, &rat(1, 8), 11).unwrap();
        assert!(o.points.iter().all(|p| g.contains(p)));
        assert!(verify_jumps(&g, &o).unwrap() < rat(1, 8));
        let od = SystemSpec::Odometer(OdometerSystem::new(8).unwrap());
        let o = perturbed_orbit(&od, &Point::Word(vec![0; 8]), 30, &rat(1, 16), 11).unwrap();
        assert!(verify_jumps(&od, &o).unwrap() < rat(1, 16));
    }

    proptest! {
        #[test]
        fn true_orbits_have_zero_jump(k in 0i64..=997, len in 1usize..20) {
            let s = t2();
            let x0 = Point::Real(rat(k, 997));
            let o = true_orbit(&s, &x0, len).unwrap();
            prop_assert_eq!(verify_jumps(&s, &o).unwrap(), int(0));
            prop_assert_eq!(deviation(&s, &x0, &o).unwrap().max_deviation, int(0));
        }

        #[test]
        fn perturbation_is_deterministic(seed in 0u64..1000, k in 0i64..100) {
            let s = t2();
            let x0 = Point::Real(rat(k, 100));
            let d = rat(1, 64);
            let a = perturbed_orbit(&s, &x0, 12, &d, seed).unwrap();
            prop_assert_eq!(&a, &perturbed_orbit(&s, &x0, 12, &d, seed).unwrap());
            prop_assert!(verify_jumps(&s, &a).unwrap() < d);
        }
    }
}
