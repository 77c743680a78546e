//! Reductions built on the exact h-shadowing solver: solving through an
//! iterate `f^n`, and the staged construction for asymptotic pseudo-orbits.

use num_traits::Signed;
use serde::Serialize;

use crate::numerics::{int, pow2_neg, Rational, RationalIntervalSet};
use crate::pseudo_orbits::{deviation, downsample, jumps, PseudoOrbit};
use crate::systems::{distance, Point, SystemSpec};

use super::{
    ball_expanding_delta, check_epsilon, finite_horizon_delta, h_shadow_solve, reals, FeasibleSet,
    ShadowCertificate, ShadowConstants, ShadowError, Verdict,
};

fn subset_check(region: &RationalIntervalSet, xs: &[Rational]) -> Result<(), ShadowError> {
    match xs.iter().position(|x| !region.contains(x)) {
        Some(i) => Err(ShadowError::Precondition(format!("orbit point {i} lies outside the region"))),
        None => Ok(()),
    }
}

/// Some `z` with `f^steps(z) = target` and every intermediate point in the region.
fn backward_extension(
    system: &SystemSpec,
    region: &RationalIntervalSet,
    target: &Rational,
    steps: usize,
) -> Result<Option<Rational>, ShadowError> {
    if steps == 0 {
        return Ok(Some(target.clone()));
    }
    for z in system.point_preimages(target)? {
        if !region.contains(&z) {
            continue;
        }
        if let Some(found) = backward_extension(system, region, &z, steps - 1)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

fn image_set(map: &SystemSpec, set: &RationalIntervalSet, steps: usize) -> RationalIntervalSet {
    let SystemSpec::Pl(f) = map else { unreachable!("checked by caller") };
    let mut out = set.clone();
    for _ in 0..steps {
        out = RationalIntervalSet::normalize(out.parts().iter().map(|p| f.image_interval(p)));
    }
    out
}

/// h-shadowing of a pseudo-orbit in `region` by way of the iterate `f^n`.
///
/// With `m = jn + r` the orbit is extended backwards by `s = (n - r) mod n`
/// exact preimage steps so its length is a multiple of `n`, every `n`-th
/// point is h-shadowed for `f^n` at the finite-horizon radius, and the
/// shadowing point is pushed forward `s` steps.
pub fn h_shadow_via_iterate(
    system: &SystemSpec,
    n: usize,
    region: &RationalIntervalSet,
    orbit: &PseudoOrbit,
    epsilon: &Rational,
) -> Result<ShadowCertificate, ShadowError> {
    check_epsilon(epsilon)?;
    let SystemSpec::Pl(f) = system else {
        return Err(ShadowError::Unsupported(system.kind()));
    };
    if n == 0 {
        return Err(ShadowError::Precondition("iterate order must be at least 1".into()));
    }
    let xs = reals(orbit)?;
    let covered =
        RationalIntervalSet::normalize(region.parts().iter().map(|p| f.image_interval(p)));
    if !region.is_subset_of(&covered) {
        return Err(ShadowError::Precondition("the image of the region does not cover it".into()));
    }
    subset_check(region, &xs)?;
    let m = xs.len() - 1;
    let s = (n - m % n) % n;
    let lipschitz = f.lipschitz();
    let eps_prime = if n == 1 { epsilon.clone() } else { finite_horizon_delta(&lipschitz, n - 1, epsilon) };
    let max_jump = jumps(system, orbit)?.into_iter().max().unwrap_or_default();
    if n > 1 && max_jump > eps_prime {
        return Err(ShadowError::Precondition(format!(
            "jump {max_jump} exceeds the bound {eps_prime} certified for the iterate"
        )));
    }
    let Some(z) = backward_extension(system, region, &xs[0], s)? else {
        return Err(ShadowError::Precondition("no backward extension inside the region".into()));
    };
    let mut extended = system.orbit(&Point::Real(z), s)?;
    extended.pop();
    extended.extend(orbit.points.iter().cloned());
    let coarse = downsample(&PseudoOrbit::new(extended)?, n, 0)?;
    let power = SystemSpec::Pl(f.power(n));
    let inner = h_shadow_solve(&power, &coarse, &eps_prime)?;

    let mut cert = inner.clone();
    cert.constants = ShadowConstants {
        epsilon: Some(epsilon.clone()),
        delta: Some(max_jump),
        epsilon_prime: Some(eps_prime),
        ..ShadowConstants::default()
    };
    cert.report = None;
    cert.witness = None;
    if let FeasibleSet::Intervals(starts) = &inner.feasible {
        cert.feasible = FeasibleSet::Intervals(image_set(system, starts, s));
    }
    if let Some(Point::Real(u)) = &inner.witness {
        let w = system.iterate(&Point::Real(u.clone()), s)?;
        let report = deviation(system, &w, orbit)?;
        if !report.exact_hit || report.max_deviation > *epsilon {
            return Err(ShadowError::Precondition("iterate witness fails to shadow the orbit".into()));
        }
        cert.report = Some(report);
        cert.witness = Some(w);
        cert.verdict = Verdict::Yes;
    } else {
        cert.verdict = Verdict::No;
        cert.feasible = FeasibleSet::Empty;
    }
    Ok(cert)
}

/// Which of the four stage conditions held.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StageChecks {
    /// Stays within `ε_i` of the previous stage point up to `k_i`.
    pub follows_previous: bool,
    /// Stays within `ε_i` of the pseudo-orbit on `(k_i, k_{i+1}]`.
    pub tracks_window: bool,
    /// Lands exactly on `x_{k_{i+1}}`.
    pub exact_hit: bool,
    /// Stays within `ε` of the region.
    pub near_region: bool,
}

impl StageChecks {
    pub fn all(&self) -> bool {
        self.follows_previous && self.tracks_window && self.exact_hit && self.near_region
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StagedShadowLog {
    #[serde(serialize_with = "points_text")]
    pub stage_points: Vec<Point>,
    /// `k_0 = 0 < k_1 < ...`; stage `i` ends at `k_{i+1}`.
    pub stage_horizons: Vec<usize>,
    #[serde(with = "crate::numerics::vec_rational_serde")]
    pub stage_bounds: Vec<Rational>,
    #[serde(with = "crate::numerics::vec_rational_serde")]
    pub stage_deltas: Vec<Rational>,
    pub condition_checks: Vec<StageChecks>,
    pub failed_stage: Option<usize>,
    /// Largest distance to the pseudo-orbit over the final stage window.
    #[serde(with = "crate::numerics::opt_rational_serde")]
    pub terminal_deviation: Option<Rational>,
}

fn points_text<S: serde::Serializer>(pts: &[Point], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(pts.iter().map(super::point_text))
}

impl StagedShadowLog {
    pub fn is_complete(&self) -> bool {
        self.failed_stage.is_none() && self.condition_checks.iter().all(StageChecks::all)
    }

    /// Stages after the first.
    pub fn refinements(&self) -> usize {
        self.stage_points.len().saturating_sub(1)
    }
}

fn expansion_constant(system: &SystemSpec) -> Result<Rational, ShadowError> {
    let mu = match system {
        SystemSpec::Pl(f) => f.min_abs_slope(),
        SystemSpec::Cantor(_) => int(3),
        _ => return Err(ShadowError::Unsupported(system.kind())),
    };
    if mu <= int(1) {
        return Err(ShadowError::Precondition("map is not expanding".into()));
    }
    Ok(mu)
}

/// Staged construction for an asymptotic pseudo-orbit.
///
/// Stage `i` works at `ε_i = ε 2^-(i+1)`. Its horizon `k_i` is the first
/// index after `k_{i-1}` from which every remaining jump is at most `δ_i`,
/// the ball-expanding bound at `ε_i` (with `ν = ε_i` and `μ` the minimal
/// expansion). `z_0` h-shadows `x_0..x_{k_1}`; `z_i` h-shadows the orbit of
/// `z_{i-1}` up to `k_i` followed by `x_{k_i+1}..x_{k_{i+1}}`. The final
/// stage runs to the end of the orbit.
pub fn asymptotic_shadow(
    system: &SystemSpec,
    orbit: &PseudoOrbit,
    region: &RationalIntervalSet,
    epsilon: &Rational,
) -> Result<StagedShadowLog, ShadowError> {
    check_epsilon(epsilon)?;
    if orbit.schedule.is_none() {
        return Err(ShadowError::Precondition("pseudo-orbit has no decay schedule".into()));
    }
    let mu = expansion_constant(system)?;
    let xs = reals(orbit)?;
    let last = xs.len() - 1;
    let js = jumps(system, orbit)?;
    // tail[k] = largest jump at index >= k
    let mut tail = vec![int(0); last + 1];
    for k in (0..last).rev() {
        tail[k] = std::cmp::max(tail[k + 1].clone(), js[k].clone());
    }
    let bound = |i: usize| epsilon * pow2_neg(i as u32 + 1);
    let delta = |i: usize| ball_expanding_delta(&mu, &bound(i), &bound(i)).map(|(_, d)| d);

    let mut log = StagedShadowLog {
        stage_points: Vec::new(),
        stage_horizons: vec![0],
        stage_bounds: Vec::new(),
        stage_deltas: Vec::new(),
        condition_checks: Vec::new(),
        failed_stage: None,
        terminal_deviation: None,
    };
    let mut previous: Option<Vec<Rational>> = None;
    loop {
        let stage = log.stage_points.len();
        let k = log.stage_horizons[stage];
        let next = if tail[k] == int(0) {
            last
        } else {
            let d = delta(stage + 1)?;
            (k + 1..=last).find(|&t| tail[t] <= d).expect("the tail at the last index is empty")
        };
        let eps_i = bound(stage);
        log.stage_bounds.push(eps_i.clone());
        log.stage_deltas.push(delta(stage)?);

        let mut centers: Vec<Rational> = match &previous {
            Some(prev) => prev[..=k].to_vec(),
            None => vec![xs[0].clone()],
        };
        centers.extend(xs[centers.len()..=next].iter().cloned());
        let spliced = PseudoOrbit::from_reals(centers.clone())?;
        let cert = h_shadow_solve(system, &spliced, &eps_i)?;
        let Some(Point::Real(z)) = cert.witness else {
            log.failed_stage = Some(stage);
            return Ok(log);
        };
        let path: Vec<Rational> = system
            .orbit(&Point::Real(z.clone()), next)?
            .into_iter()
            .map(|p| p.real().cloned().expect("real system"))
            .collect();
        let within = |a: &Rational, b: &Rational, r: &Rational| (a - b).abs() <= *r;
        let checks = StageChecks {
            follows_previous: match &previous {
                Some(prev) => (0..=k).all(|j| within(&path[j], &prev[j], &eps_i)),
                None => true,
            },
            tracks_window: (if previous.is_some() { k + 1 } else { 0 }..=next)
                .all(|j| within(&path[j], &xs[j], &eps_i)),
            exact_hit: path[next] == xs[next],
            near_region: path.iter().all(|p| region.distance_to(p).is_some_and(|d| d < *epsilon)),
        };
        log.condition_checks.push(checks);
        log.stage_points.push(Point::Real(z));
        log.stage_horizons.push(next);
        if !checks.all() {
            log.failed_stage = Some(stage);
            return Ok(log);
        }
        if next == last {
            let from = if previous.is_some() { k + 1 } else { 0 };
            let terminal = (from..=next)
                .map(|j| distance(&Point::Real(path[j].clone()), &Point::Real(xs[j].clone())))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .max()
                .unwrap_or_default();
            log.terminal_deviation = Some(terminal);
            return Ok(log);
        }
        previous = Some(path);
    }
}
