//! Decision procedures and constructive solvers for ε-shadowing and
//! h-shadowing of finite pseudo-orbits.
//!
//! For piecewise-affine systems the feasible set is computed exactly by
//! backward constraint propagation: with tubes `B_i = B̄_ε(x_i) ∩ space`,
//! `T_m = B_m` and `T_i = B_i ∩ f^-1(T_{i+1})`, the set `T_0` is exactly the
//! set of initial points whose orbit stays in every tube. h-shadowing uses
//! the same recursion started from `T_m = {x_m}`.

mod staged;
mod symbolic;
mod witnesses;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::numerics::{
    format_rational, int, opt_rational_serde, Enclosure, Interval, Rational,
    RationalIntervalSet,
};
use crate::pseudo_orbits::{deviation, DeviationReport, OrbitError, PseudoOrbit};
use crate::systems::{format_point, Point, SystemError, SystemSpec, DEFAULT_PRECISION};

pub use staged::{asymptotic_shadow, h_shadow_via_iterate, StageChecks, StagedShadowLog};
pub use witnesses::{
    ball_expanding_suite, critical_return_distance, grid_shadowers, nonshadow_witness_tent,
    region_pseudo_orbit, slimit_counterexample_check, slimit_minimal_n, NonshadowWitness,
    SLimitReport, SuiteOutcome, RECURRENCE_HORIZON,
};

#[derive(Debug, Error)]
pub enum ShadowError {
    #[error("operation not supported for {0} systems")]
    Unsupported(&'static str),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    System(#[from] SystemError),
}

/// Three-valued outcome; exact systems only ever answer `Yes` or `No`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShadowMode {
    Oracle,
    HShadow,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ShadowConstants {
    #[serde(with = "opt_rational_serde")]
    pub epsilon: Option<Rational>,
    #[serde(with = "opt_rational_serde")]
    pub delta: Option<Rational>,
    #[serde(with = "opt_rational_serde")]
    pub mu: Option<Rational>,
    #[serde(with = "opt_rational_serde")]
    pub nu: Option<Rational>,
    #[serde(with = "opt_rational_serde")]
    pub epsilon_prime: Option<Rational>,
}

impl ShadowConstants {
    pub fn eps(epsilon: &Rational) -> Self {
        Self { epsilon: Some(epsilon.clone()), ..Self::default() }
    }
}

/// Feasible initial points.
#[derive(Clone, Debug, PartialEq)]
pub enum FeasibleSet {
    Intervals(RationalIntervalSet),
    /// Every point whose first symbols are the given word.
    Cylinder(Vec<u8>),
    Empty,
}

impl FeasibleSet {
    pub fn is_empty(&self) -> bool {
        match self {
            FeasibleSet::Intervals(s) => s.is_empty(),
            FeasibleSet::Cylinder(_) => false,
            FeasibleSet::Empty => true,
        }
    }

    pub fn intervals(&self) -> Option<&RationalIntervalSet> {
        match self {
            FeasibleSet::Intervals(s) => Some(s),
            _ => None,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (FeasibleSet::Intervals(s), Point::Real(x)) => s.contains(x),
            (FeasibleSet::Cylinder(w), Point::Seq(q)) => q.prefix(w.len()) == *w,
            (FeasibleSet::Cylinder(w), Point::Word(v)) => v.starts_with(w),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShadowCertificate {
    pub mode: ShadowMode,
    pub verdict: Verdict,
    pub feasible: FeasibleSet,
    pub witness: Option<Point>,
    /// Enclosure of an irrational witness (quadratic h-shadowing).
    pub witness_enclosure: Option<Interval<Rational>>,
    pub report: Option<DeviationReport>,
    /// Whether `report` was computed in exact arithmetic.
    pub report_exact: bool,
    pub constants: ShadowConstants,
    /// States `T_0, ..., T_m` of the backward propagation.
    pub transcript: Vec<RationalIntervalSet>,
    pub precision: Option<u32>,
}

impl ShadowCertificate {
    fn new(mode: ShadowMode, epsilon: &Rational) -> Self {
        Self {
            mode,
            verdict: Verdict::No,
            feasible: FeasibleSet::Empty,
            witness: None,
            witness_enclosure: None,
            report: None,
            report_exact: true,
            constants: ShadowConstants::eps(epsilon),
            transcript: Vec::new(),
            precision: None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Yes
    }

    pub fn feasible_set(&self) -> Option<&RationalIntervalSet> {
        self.feasible.intervals()
    }

    pub fn to_json(&self, system: &SystemSpec) -> Value {
        let feasible = match &self.feasible {
            FeasibleSet::Intervals(s) => serde_json::to_value(s).expect("serializable"),
            FeasibleSet::Cylinder(w) => json!({ "cylinder": cylinder_text(system, w) }),
            FeasibleSet::Empty => json!([]),
        };
        json!({
            "mode": self.mode,
            "verdict": self.verdict,
            "feasible_set": feasible,
            "witness": self.witness.as_ref().map(|p| system.format_point(p)),
            "witness_enclosure": self.witness_enclosure.as_ref()
                .map(|iv| [format_rational(iv.lo()), format_rational(iv.hi())]),
            "report": self.report,
            "report_exact": self.report_exact,
            "constants": self.constants,
            "transcript": self.transcript,
            "precision": self.precision,
        })
    }
}

fn cylinder_text(system: &SystemSpec, w: &[u8]) -> String {
    match system {
        SystemSpec::Sft(s) => s.format_word(w),
        _ => crate::systems::format_binary(w),
    }
}

/// `ε′ = min(ε, ν)` and `δ = (μ − 1) ε′`.
pub fn ball_expanding_delta(
    mu: &Rational,
    nu: &Rational,
    epsilon: &Rational,
) -> Result<(Rational, Rational), ShadowError> {
    if *mu <= int(1) {
        return Err(ShadowError::Precondition("mu must exceed 1".into()));
    }
    if *nu <= int(0) || *epsilon <= int(0) {
        return Err(ShadowError::Precondition("nu and epsilon must be positive".into()));
    }
    let eps_prime = if epsilon <= nu { epsilon.clone() } else { nu.clone() };
    let delta = (mu - int(1)) * &eps_prime;
    Ok((eps_prime, delta))
}

/// Largest δ for which δ-close starts and δ-jumps keep `n` steps within ε,
/// from the error recursion `e_{k+1} <= L e_k + δ`.
pub fn finite_horizon_delta(lipschitz: &Rational, n: usize, epsilon: &Rational) -> Rational {
    let l = if *lipschitz < int(1) { int(1) } else { lipschitz.clone() };
    if l == int(1) {
        return epsilon / int(n as i64 + 1);
    }
    let mut power = int(1);
    for _ in 0..=n {
        power *= &l;
    }
    epsilon * (&l - int(1)) / (power - int(1))
}

fn reals(orbit: &PseudoOrbit) -> Result<Vec<Rational>, ShadowError> {
    orbit.reals().ok_or(ShadowError::System(SystemError::MixedPoints))
}

fn tube(space: &RationalIntervalSet, center: &Rational, epsilon: &Rational) -> RationalIntervalSet {
    space.intersect_interval(&Interval::ball(center, epsilon))
}

/// Exact backward propagation; the terminal set is the last tube, or the
/// terminal point itself for h-shadowing.
fn backward_sets(
    system: &SystemSpec,
    centers: &[Rational],
    epsilon: &Rational,
    exact_hit: bool,
) -> Result<Vec<RationalIntervalSet>, ShadowError> {
    let space = system.space().ok_or(ShadowError::Unsupported(system.kind()))?;
    let m = centers.len() - 1;
    let mut sets = vec![RationalIntervalSet::empty(); m + 1];
    sets[m] = if exact_hit {
        RationalIntervalSet::point(centers[m].clone()).intersect(&space)
    } else {
        tube(&space, &centers[m], epsilon)
    };
    for i in (0..m).rev() {
        if sets[i + 1].is_empty() {
            break;
        }
        let ball = Interval::ball(&centers[i], epsilon);
        sets[i] = system.preimage_within(&sets[i + 1], &ball)?.intersect(&space);
    }
    Ok(sets)
}

fn check_epsilon(epsilon: &Rational) -> Result<(), ShadowError> {
    if *epsilon <= int(0) {
        return Err(ShadowError::Precondition("epsilon must be positive".into()));
    }
    Ok(())
}

/// Decides whether some orbit stays in every closed ε-tube around the pseudo-orbit.
pub fn shadow_oracle(
    system: &SystemSpec,
    orbit: &PseudoOrbit,
    epsilon: &Rational,
) -> Result<ShadowCertificate, ShadowError> {
    check_epsilon(epsilon)?;
    match system {
        SystemSpec::Pl(_) | SystemSpec::Cantor(_) => {
            let centers = reals(orbit)?;
            let sets = backward_sets(system, &centers, epsilon, false)?;
            let mut cert = ShadowCertificate::new(ShadowMode::Oracle, epsilon);
            cert.feasible = FeasibleSet::Intervals(sets[0].clone());
            if let Some(w) = sets[0].leftmost() {
                let w = Point::Real(w.clone());
                cert.report = Some(deviation(system, &w, orbit)?);
                cert.witness = Some(w);
                cert.verdict = Verdict::Yes;
            }
            cert.transcript = sets;
            Ok(cert)
        }
        SystemSpec::SLimit(_) => shadow_oracle_enclosure(system, orbit, epsilon, DEFAULT_PRECISION, 512),
        SystemSpec::Sft(_) | SystemSpec::Odometer(_) => symbolic::oracle(system, orbit, epsilon),
        SystemSpec::Quadratic(_) => Err(ShadowError::Unsupported("quadratic (use the enclosure oracle)")),
    }
}

/// h-shadowing: an orbit inside the tubes that lands exactly on the last point.
///
/// When the first pseudo-orbit point itself qualifies it is returned, so a
/// genuine orbit is shadowed by its own starting point; otherwise the
/// leftmost candidate is used.
pub fn h_shadow_solve(
    system: &SystemSpec,
    orbit: &PseudoOrbit,
    epsilon: &Rational,
) -> Result<ShadowCertificate, ShadowError> {
    check_epsilon(epsilon)?;
    match system {
        SystemSpec::Pl(_) | SystemSpec::Cantor(_) => {
            let centers = reals(orbit)?;
            let sets = backward_sets(system, &centers, epsilon, true)?;
            let mut cert = ShadowCertificate::new(ShadowMode::HShadow, epsilon);
            cert.feasible = FeasibleSet::Intervals(sets[0].clone());
            let pick = if sets[0].contains(&centers[0]) { Some(&centers[0]) } else { sets[0].leftmost() };
            if let Some(w) = pick {
                let w = Point::Real(w.clone());
                let report = deviation(system, &w, orbit)?;
                debug_assert!(report.exact_hit);
                cert.report = Some(report);
                cert.witness = Some(w);
                cert.verdict = Verdict::Yes;
            }
            cert.transcript = sets;
            Ok(cert)
        }
        SystemSpec::Quadratic(_) | SystemSpec::SLimit(_) => {
            h_shadow_enclosure(system, orbit, epsilon, DEFAULT_PRECISION, 512)
        }
        SystemSpec::Sft(_) | SystemSpec::Odometer(_) => symbolic::h_shadow(system, orbit, epsilon),
    }
}

/// Forward deviation bounds of a rational start via outward-rounded enclosures.
fn enclosure_report(
    system: &SystemSpec,
    y: &Rational,
    centers: &[Rational],
    bits: u32,
) -> Result<DeviationReport, ShadowError> {
    let mut e = Enclosure::exact(y.clone(), bits);
    let mut per_step = Vec::with_capacity(centers.len());
    for (i, c) in centers.iter().enumerate() {
        if i > 0 {
            e = match system {
                SystemSpec::Quadratic(q) => {
                    let shifted = e.add_const(&-q.critical_point());
                    let sq = shifted.square();
                    let peak = q.eval(&q.critical_point());
                    sq.scale(&q.parameter).neg_add(&peak)
                }
                SystemSpec::SLimit(_) => {
                    if e.hi < int(0) {
                        e
                    } else {
                        e.square()
                    }
                }
                _ => return Err(ShadowError::Unsupported(system.kind())),
            };
        }
        per_step.push(enclosure_distance(&e.lo, &e.hi, c));
    }
    let max_deviation = per_step.iter().max().cloned().unwrap_or_default();
    Ok(DeviationReport { max_deviation, per_step, exact_hit: false })
}

/// Upper bound on the distance from `c` to any point of `[lo, hi]`.
fn enclosure_distance(lo: &Rational, hi: &Rational, c: &Rational) -> Rational {
    std::cmp::max(hi - c, c - lo)
}

/// Three-valued oracle for systems with irrational preimages: `No` when the
/// outer propagation empties, `Yes` when the inner one does not.
pub fn shadow_oracle_enclosure(
    system: &SystemSpec,
    orbit: &PseudoOrbit,
    epsilon: &Rational,
    start_bits: u32,
    max_bits: u32,
) -> Result<ShadowCertificate, ShadowError> {
    check_epsilon(epsilon)?;
    let centers = reals(orbit)?;
    let space = system.space().ok_or(ShadowError::Unsupported(system.kind()))?;
    let m = centers.len() - 1;
    let mut bits = start_bits.max(8);
    let mut cert = ShadowCertificate::new(ShadowMode::Oracle, epsilon);
    loop {
        let mut outer = vec![RationalIntervalSet::empty(); m + 1];
        let mut inner = vec![RationalIntervalSet::empty(); m + 1];
        outer[m] = tube(&space, &centers[m], epsilon);
        inner[m] = outer[m].clone();
        for i in (0..m).rev() {
            let b = tube(&space, &centers[i], epsilon);
            outer[i] = b.intersect(&system.preimage_bounds(&outer[i + 1], bits)?.0);
            inner[i] = b.intersect(&system.preimage_bounds(&inner[i + 1], bits)?.1);
        }
        cert.precision = Some(bits);
        cert.feasible = FeasibleSet::Intervals(outer[0].clone());
        cert.transcript = outer;
        if cert.feasible.is_empty() {
            cert.verdict = Verdict::No;
            return Ok(cert);
        }
        if let Some(w) = inner[0].leftmost() {
            cert.verdict = Verdict::Yes;
            cert.report = Some(enclosure_report(system, w, &centers, bits.max(128))?);
            cert.report_exact = false;
            cert.witness = Some(Point::Real(w.clone()));
            return Ok(cert);
        }
        if bits >= max_bits {
            cert.verdict = Verdict::Unknown;
            return Ok(cert);
        }
        bits = (bits * 2).min(max_bits);
    }
}

/// Range of the map over its domain, needed for preimage chains to exist.
fn image_range(system: &SystemSpec) -> Option<Interval<Rational>> {
    match system {
        SystemSpec::Quadratic(q) => {
            let d = q.domain();
            let low = std::cmp::min(q.eval(d.lo()), q.eval(d.hi()));
            Interval::new(low, q.eval(&q.critical_point())).ok()
        }
        _ => None,
    }
}

const MAX_CHAINS: usize = 4096;

/// h-shadowing through backward chains of preimage enclosures of `x_m`.
///
/// Each chain encloses a genuine preimage sequence; `Yes` when some chain
/// stays definitely inside every tube, `No` when every chain leaves one.
pub fn h_shadow_enclosure(
    system: &SystemSpec,
    orbit: &PseudoOrbit,
    epsilon: &Rational,
    start_bits: u32,
    max_bits: u32,
) -> Result<ShadowCertificate, ShadowError> {
    check_epsilon(epsilon)?;
    let centers = reals(orbit)?;
    let space = system.space().ok_or(ShadowError::Unsupported(system.kind()))?;
    let range = image_range(system);
    let m = centers.len() - 1;
    let mut bits = start_bits.max(8);
    let mut cert = ShadowCertificate::new(ShadowMode::HShadow, epsilon);
    loop {
        cert.precision = Some(bits);
        // each chain: enclosures E_m, E_{m-1}, ... and whether all are surely inside
        let mut chains: Vec<(Vec<Interval<Rational>>, bool)> = if space.contains(&centers[m]) {
            vec![(vec![Interval::point(centers[m].clone())], true)]
        } else {
            Vec::new()
        };
        let heads = |cs: &[(Vec<Interval<Rational>>, bool)]| {
            RationalIntervalSet::normalize(cs.iter().map(|c| c.0.last().expect("nonempty").clone()))
        };
        let mut transcript = vec![heads(&chains)];
        let mut overflow = false;
        for i in (0..m).rev() {
            let b = tube(&space, &centers[i], epsilon);
            let mut next = Vec::new();
            for (hist, sure) in &chains {
                let e = hist.last().expect("nonempty");
                let in_range = range.as_ref().is_none_or(|r| r.contains(e.lo()) && r.contains(e.hi()));
                let pre = system.preimage_bounds(&RationalIntervalSet::single(e.clone()), bits)?.0;
                for part in pre.into_parts() {
                    if b.intersect_interval(&part).is_empty() {
                        continue;
                    }
                    let inside = RationalIntervalSet::single(part.clone()).is_subset_of(&b);
                    let mut h = hist.clone();
                    h.push(part);
                    next.push((h, *sure && inside && in_range));
                }
            }
            if next.len() > MAX_CHAINS {
                overflow = true;
                next.truncate(MAX_CHAINS);
            }
            chains = next;
            transcript.push(heads(&chains));
            if chains.is_empty() {
                break;
            }
        }
        transcript.reverse();
        cert.transcript = transcript;
        if chains.is_empty() && !overflow {
            cert.verdict = Verdict::No;
            cert.feasible = FeasibleSet::Empty;
            return Ok(cert);
        }
        cert.feasible = FeasibleSet::Intervals(heads(&chains));
        if let Some((hist, _)) = chains.iter().find(|c| c.1) {
            cert.verdict = Verdict::Yes;
            let e0 = hist.last().expect("nonempty").clone();
            if e0.is_degenerate() {
                let w = Point::Real(e0.lo().clone());
                cert.report = Some(deviation(system, &w, orbit)?);
                cert.witness = Some(w);
            } else {
                let per_step: Vec<Rational> = hist
                    .iter()
                    .rev()
                    .zip(&centers)
                    .map(|(e, c)| enclosure_distance(e.lo(), e.hi(), c))
                    .collect();
                let max_deviation = per_step.iter().max().cloned().unwrap_or_default();
                cert.report = Some(DeviationReport { max_deviation, per_step, exact_hit: true });
                cert.report_exact = false;
            }
            cert.witness_enclosure = Some(e0);
            return Ok(cert);
        }
        if bits >= max_bits {
            cert.verdict = Verdict::Unknown;
            return Ok(cert);
        }
        bits = (bits * 2).min(max_bits);
    }
}

pub(crate) fn point_text(p: &Point) -> String {
    format_point(p)
}
