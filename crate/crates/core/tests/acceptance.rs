//! Acceptance criteria, one line each. Runs without the libtest harness so
//! every verdict is printed even when all pass.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shadowlab::cli::scenarios::random_full_lap_map;
use shadowlab::expansivity::{
    cantor_origin_image, cantor_truncated_segment, check_ball_expanding, check_expanding, check_locally_injective,
    find_ball_constants, schwarzian, Holds, RegionSpec,
};
use shadowlab::kneading::{critical_orbit_clearance, find_parameter, is_recurrent_prefix, k_word, WORKING_BITS};
use shadowlab::numerics::{int, pow2_neg, pow3_neg, rat, sqrt_enclosure, Rational, RationalIntervalSet};
use shadowlab::pseudo_orbits::{perturbed_orbit, scheduled_orbit, DecaySchedule, PseudoOrbit};
use shadowlab::shadowing::{
    asymptotic_shadow, ball_expanding_delta, h_shadow_solve, h_shadow_via_iterate, nonshadow_witness_tent,
    region_pseudo_orbit, shadow_oracle, slimit_counterexample_check, slimit_minimal_n, FeasibleSet,
};
use shadowlab::systems::{
    CantorSystem, OdometerSystem, PiecewiseLinearMap, Point, QuadraticFamilyMap, SLimitSystem, ShiftSystem,
    SystemSpec,
};

const SEED: u64 = 7;

/// `Ok` may carry a note printed under the verdict line.
type Outcome = Result<Option<String>, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn t2() -> SystemSpec {
    SystemSpec::tent(int(2)).unwrap()
}

fn unit() -> RationalIntervalSet {
    RationalIntervalSet::from_pairs([(int(0), int(1))]).unwrap()
}

// 1 ---------------------------------------------------------------------

fn cantor_example() -> Outcome {
    let c = CantorSystem::new(6).unwrap();
    let s = SystemSpec::Cantor(c.clone());
    let space = RegionSpec::intervals(s.space().unwrap());
    let expanding = check_expanding(&s, &space, &rat(1, 9), &int(3)).unwrap();
    let ball = check_ball_expanding(&s, &RegionSpec::points(vec![Point::Real(int(0))]), &int(3), &rat(1, 27), &[rat(1, 54)])
        .unwrap();
    let mut problems = Vec::new();
    if expanding.holds != Holds::Certified {
        let cex = expanding.counterexample.as_ref().map(|c| c.inequality.clone()).unwrap_or_default();
        problems.push(format!("expanding with delta=1/9, mu=3 is {} ({cex})", expanding.holds));
    }
    if ball.holds != Holds::Falsified {
        problems.push(format!("ball expansion at 0 is {}", ball.holds));
    }
    for n in 4..=6 {
        if cantor_origin_image(&c, n) != cantor_truncated_segment(&c, &pow3_neg(n - 3)) {
            problems.push(format!("n={n}: image is not X ∩ [0, 1/3^{}]", n - 3));
        }
    }
    ensure(problems.is_empty(), || problems.join("; "))?;
    Ok(None)
}

// 2 ---------------------------------------------------------------------

fn symmetric(x: &Point, y: &Point) -> bool {
    x.real().zip(y.real()).is_some_and(|(a, b)| a + b == int(1) && a != b)
}

fn tent_ball_example() -> Outcome {
    let s = t2();
    let whole = RegionSpec::intervals(unit());
    let grid: Vec<Rational> = (1..=50).map(|k| rat(k, 204)).collect();
    let ball = check_ball_expanding(&s, &whole, &int(2), &rat(1, 4), &grid).unwrap();
    ensure(ball.holds == Holds::Certified, || format!("ball expanding is {}", ball.holds))?;
    let expanding = check_expanding(&s, &whole, &rat(1, 4), &rat(3, 2)).unwrap();
    let inj = check_locally_injective(&s, &whole).unwrap();
    for (name, v) in [("expanding", &expanding), ("locally one-to-one", &inj)] {
        ensure(v.holds == Holds::Falsified, || format!("{name} is {}", v.holds))?;
        let cex = v.counterexample.as_ref().unwrap();
        ensure(symmetric(&cex.x, &cex.y), || format!("{name} pair not symmetric"))?;
        // independent re-evaluation: T2 folds x and 1 - x onto the same value
        let (x, y) = (cex.x.real().unwrap(), cex.y.real().unwrap());
        let tent = |z: &Rational| if *z <= rat(1, 2) { int(2) * z } else { int(2) - int(2) * z };
        ensure(tent(x) == tent(y), || format!("{name} pair has distinct images"))?;
    }
    Ok(None)
}

// 3 ---------------------------------------------------------------------

/// Evaluates a piecewise-linear map from its breakpoint table.
fn pl_eval(f: &PiecewiseLinearMap<Rational>, x: &Rational) -> Rational {
    let (xs, ys) = (f.breakpoints(), f.values());
    let i = xs.windows(2).position(|w| *x <= w[1]).unwrap();
    &ys[i] + (&ys[i + 1] - &ys[i]) * (x - &xs[i]) / (&xs[i + 1] - &xs[i])
}

fn suite_failures(f: &PiecewiseLinearMap<Rational>, mu: &Rational, nu: &Rational, seed: u64) -> usize {
    let s = SystemSpec::Pl(f.clone());
    let eps = rat(1, 100);
    let (_, delta) = ball_expanding_delta(mu, nu, &eps).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..1000 {
        let len = rng.gen_range(2..=50);
        let orbit = region_pseudo_orbit(&s, &unit(), len, &delta, &mut rng).unwrap();
        let xs = orbit.reals().unwrap();
        let cert = h_shadow_solve(&s, &orbit, &eps).unwrap();
        let ok = match cert.witness.as_ref().and_then(Point::real) {
            Some(y) => {
                let mut z = y.clone();
                let mut within = true;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        z = pl_eval(f, &z);
                    }
                    within &= (&z - x).abs() <= eps;
                }
                within && z == xs[xs.len() - 1]
            }
            None => false,
        };
        failures += usize::from(!ok);
    }
    failures
}

fn hshadow_suite() -> Outcome {
    let tent = PiecewiseLinearMap::tent(int(2)).unwrap();
    let f = suite_failures(&tent, &int(2), &rat(1, 4), SEED);
    ensure(f == 0, || format!("T2: {f} of 1000 not h-shadowed"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5eed);
    let nus = [rat(1, 4), rat(1, 8), rat(1, 16), rat(1, 32)];
    for k in 0..10 {
        let map = random_full_lap_map(&mut rng);
        let mu = map.min_abs_slope();
        let s = SystemSpec::Pl(map.clone());
        let v = find_ball_constants(&s, &RegionSpec::intervals(unit()), std::slice::from_ref(&mu), &nus).unwrap();
        let v = v.ok_or_else(|| format!("map {k}: not certified ball expanding"))?;
        let f = suite_failures(&map, &mu, v.constants.nu.as_ref().unwrap(), SEED + k);
        ensure(f == 0, || format!("map {k}: {f} of 1000 not h-shadowed"))?;
    }
    Ok(None)
}

// 4 ---------------------------------------------------------------------

/// All quantities below live on the grid 2^-20, stored as integers.
const SCALE_BITS: u32 = 20;
const GRID_BITS: u32 = 16;

fn to_rational(k: i64) -> Rational {
    Rational::new(BigInt::from(k), BigInt::one() << SCALE_BITS)
}

fn t2_int(x: i64) -> i64 {
    let half = 1i64 << (SCALE_BITS - 1);
    if x <= half {
        2 * x
    } else {
        (1i64 << (SCALE_BITS + 1)) - 2 * x
    }
}

/// Grid indices `k` with `k / 2^GRID_BITS` in the set.
fn grid_members(set: &RationalIntervalSet) -> Vec<bool> {
    let n = 1usize << GRID_BITS;
    let mut out = vec![false; n + 1];
    let scale = Rational::from_integer(BigInt::one() << GRID_BITS);
    for p in set.parts() {
        let lo = (p.lo() * &scale).ceil().to_integer();
        let hi = (p.hi() * &scale).floor().to_integer();
        let (lo, hi): (i64, i64) = (lo.try_into().unwrap(), hi.try_into().unwrap());
        for k in lo.max(0)..=hi.min(n as i64) {
            out[k as usize] = true;
        }
    }
    out
}

fn oracle_vs_grid() -> Outcome {
    let s = t2();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let one = 1i64 << SCALE_BITS;
    let step = 1i64 << (SCALE_BITS - GRID_BITS);
    let (mut outside_band, mut in_band, mut feasible) = (0usize, 0usize, 0usize);
    for _ in 0..200 {
        let len = rng.gen_range(1..=12);
        let eps = rng.gen_range(4..=64i64) << (SCALE_BITS - 10);
        let jump = rng.gen_range(0..=2 * eps);
        let mut xs = vec![rng.gen_range(0..=one)];
        while xs.len() < len {
            let next = t2_int(*xs.last().unwrap()) + rng.gen_range(-jump..=jump);
            xs.push(next.clamp(0, one));
        }
        let orbit = PseudoOrbit::from_reals(xs.iter().map(|&x| to_rational(x))).unwrap();
        let cert = shadow_oracle(&s, &orbit, &to_rational(eps)).unwrap();
        let FeasibleSet::Intervals(set) = &cert.feasible else {
            return Err("oracle returned a non-interval feasible set".into());
        };
        let member = grid_members(set);
        feasible += usize::from(!set.is_empty());
        // a start within h of the tube edge may leave it after n steps by h 2^n
        let band = step << len;
        let mut grid_hit = false;
        for (k, &inside) in member.iter().enumerate() {
            let mut z = k as i64 * step;
            let mut worst = 0i64;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    z = t2_int(z);
                }
                worst = worst.max((z - x).abs());
            }
            let brute = worst <= eps;
            grid_hit |= brute;
            if brute != inside {
                if (worst - eps).abs() <= band {
                    in_band += 1;
                } else {
                    outside_band += 1;
                }
            }
        }
        if !set.is_empty() && !grid_hit {
            // every component must be too short to contain a grid point
            let h = pow2_neg(GRID_BITS);
            if set.parts().iter().any(|p| p.len() >= h) {
                outside_band += 1;
            } else {
                in_band += 1;
            }
        }
    }
    ensure(outside_band == 0, || format!("{outside_band} disagreements outside the boundary band"))?;
    Ok(Some(format!("oracle feasible on {feasible} of 200; boundary-band cases {in_band}")))
}

// 5 ---------------------------------------------------------------------

fn slimit_example() -> Outcome {
    let sys = SLimitSystem::new(16).unwrap();
    let eps = rat(1, 4);
    for delta in [rat(1, 10), rat(1, 100)] {
        let n = slimit_minimal_n(&delta).unwrap();
        let rep = slimit_counterexample_check(&sys, n, &eps, &delta).unwrap();
        ensure(rep.passes(), || format!("delta={delta}: check fails"))?;
        // |(-1/2^N) - 1/2| with the limit point 1/2
        let expected = rat(1, 2) + pow2_neg(n);
        ensure(rep.step0_deviation == expected, || format!("delta={delta}: step-0 deviation {}", rep.step0_deviation))?;
        ensure(rep.step0_deviation > eps, || "step-0 deviation within epsilon".into())?;
    }
    Ok(None)
}

// 6 ---------------------------------------------------------------------

fn iterate_equivalence() -> Outcome {
    let s = t2();
    let region = RationalIntervalSet::from_pairs([(rat(1, 10), rat(9, 10))]).unwrap();
    let eps = rat(1, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut disagreements = 0;
    for _ in 0..200 {
        let len = rng.gen_range(2..=12);
        let orbit = region_pseudo_orbit(&s, &region, len, &(&eps / int(3)), &mut rng).unwrap();
        let via = h_shadow_via_iterate(&s, 2, &unit(), &orbit, &eps).unwrap();
        let direct = h_shadow_solve(&s, &orbit, &eps).unwrap();
        disagreements += usize::from(via.is_feasible() != direct.is_feasible());
    }
    ensure(disagreements == 0, || format!("{disagreements} disagreements"))?;
    Ok(None)
}

// 7 ---------------------------------------------------------------------

fn staged_construction() -> Outcome {
    let s = t2();
    let eps = rat(1, 10);
    let sched = DecaySchedule::Geometric { scale: eps.clone() };
    let o = scheduled_orbit(&s, &Point::Real(rat(2, 7)), 7, &sched, SEED).unwrap();
    ensure(o.schedule.as_ref().unwrap().bound(3) == &eps * pow2_neg(4), || "schedule is not eps 2^-(n+1)".into())?;
    let log = asymptotic_shadow(&s, &o, &unit(), &eps).unwrap();
    ensure(log.failed_stage.is_none(), || format!("stage {:?} failed", log.failed_stage))?;
    ensure(log.condition_checks.iter().all(|c| c.all()), || "a stage condition failed".into())?;
    ensure(log.refinements() == 5, || format!("{} refinements", log.refinements()))?;
    let d = log.terminal_deviation.clone().unwrap();
    ensure(d <= &eps * pow2_neg(6), || format!("terminal deviation {d}"))?;
    Ok(Some(format!("terminal deviation {d}")))
}

// 8 ---------------------------------------------------------------------

fn pl_region_suite() -> Outcome {
    let lambda = rat(9, 5);
    let s = SystemSpec::tent(lambda.clone()).unwrap();
    let region = RationalIntervalSet::from_pairs([(rat(1, 20), rat(9, 20)), (rat(11, 20), rat(19, 20))]).unwrap();
    let v = find_ball_constants(&s, &RegionSpec::intervals(region.clone()), std::slice::from_ref(&lambda), &[rat(1, 20), rat(1, 40), rat(1, 80)])
        .unwrap()
        .ok_or("region not certified ball expanding")?;
    let nu = v.constants.nu.clone().unwrap();
    let eps = rat(1, 20);
    let (_, delta) = ball_expanding_delta(&lambda, &nu, &eps).unwrap();
    let tent = PiecewiseLinearMap::tent(lambda).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = 0;
    for _ in 0..500 {
        let len = rng.gen_range(2..=50);
        let orbit = region_pseudo_orbit(&s, &region, len, &delta, &mut rng).unwrap();
        let xs = orbit.reals().unwrap();
        let cert = h_shadow_solve(&s, &orbit, &eps).unwrap();
        let ok = cert.witness.as_ref().and_then(Point::real).is_some_and(|y| {
            let mut z = y.clone();
            let mut within = (&z - &xs[0]).abs() <= eps;
            for x in &xs[1..] {
                z = pl_eval(&tent, &z);
                within &= (&z - x).abs() <= eps;
            }
            within && z == xs[xs.len() - 1]
        });
        failures += usize::from(!ok);
    }
    ensure(failures == 0, || format!("{failures} of 500 not h-shadowed"))?;
    Ok(None)
}

// 9 ---------------------------------------------------------------------

fn nonshadowing_witness() -> Outcome {
    let (lambda, upper) = sqrt_enclosure(&int(2), 40).unwrap();
    ensure(&upper - &lambda <= pow2_neg(40), || "enclosure wider than 2^-40".into())?;
    let eps = pow2_neg(12);
    let w = nonshadow_witness_tent(&lambda, &eps, &eps).unwrap();
    ensure(w.is_nonshadowing(), || "oracle feasible set is not empty".into())?;
    ensure(w.return_distance > int(2) * &eps, || "critical orbit recurs".into())?;
    // independent grid search over the first tube
    let xs = w.orbit.reals().unwrap();
    let tent = |z: &Rational| if *z <= rat(1, 2) { &lambda * z } else { &lambda * (int(1) - z) };
    let steps = 512;
    for j in 0..=steps {
        let mut z = &xs[0] - &eps + &eps * rat(2 * j, steps);
        let mut ok = (int(0)..=int(1)).contains(&z);
        for x in &xs[1..] {
            if !ok {
                break;
            }
            z = tent(&z);
            ok = (&z - x).abs() <= eps;
        }
        ensure(!ok, || format!("grid start {} shadows", &xs[0] - &eps + &eps * rat(2 * j, steps)))?;
    }
    Ok(None)
}

// 10 --------------------------------------------------------------------

fn floor_to(r: &Rational, bits: u32) -> Rational {
    let s = Rational::from_integer(BigInt::one() << bits);
    (r * &s).floor() / s
}

fn ceil_to(r: &Rational, bits: u32) -> Rational {
    let s = Rational::from_integer(BigInt::one() << bits);
    (r * &s).ceil() / s
}

/// Enclosures of `F^n(0)`, `n = 1..=last`, for `F(x) = 1 - mu x^2`, rounded outward.
fn critical_enclosures(mu: &Rational, last: usize, bits: u32) -> Vec<(Rational, Rational)> {
    let (mut lo, mut hi) = (int(1), int(1));
    let mut out = vec![(lo.clone(), hi.clone())];
    for _ in 1..last {
        let (a, b) = (&lo * &lo, &hi * &hi);
        let (sq_lo, sq_hi) = if lo <= int(0) && hi >= int(0) {
            (int(0), a.max(b))
        } else {
            (a.clone().min(b.clone()), a.max(b))
        };
        lo = floor_to(&(int(1) - mu * sq_hi), bits);
        hi = ceil_to(&(int(1) - mu * sq_lo), bits);
        out.push((lo.clone(), hi.clone()));
    }
    out
}

fn kneading_search() -> Outcome {
    let head = k_word(15).to_string();
    ensure(head == "RLLRRLRRRLRRRRL", || format!("generated prefix {head}"))?;
    ensure(!is_recurrent_prefix(&k_word(500), 3).unwrap(), || "prefix recurs".into())?;
    let search = find_parameter(&k_word(200), 15, 120).unwrap();
    ensure(search.matched, || format!("achieved {}", search.achieved))?;
    ensure(search.width() <= pow2_neg(30), || format!("bracket width {}", search.width()))?;
    let eps0 = critical_orbit_clearance(&search.mu, 2, 200, WORKING_BITS).unwrap();
    ensure(eps0.as_ref().is_some_and(|e| e.is_positive()), || "no clearance at working precision".into())?;
    // independent enclosure: itinerary and clearance
    let encl = critical_enclosures(&search.mu, 200, 640);
    let itinerary: String = encl[..15]
        .iter()
        .map(|(lo, hi)| if lo.is_positive() { 'R' } else if hi.is_negative() { 'L' } else { '?' })
        .collect();
    ensure(itinerary == head, || format!("independent itinerary {itinerary}"))?;
    // F^n(0) for n >= 2 sits at encl[n - 1]
    let clear = encl[1..].iter().all(|(lo, hi)| lo.is_positive() || hi.is_negative());
    ensure(clear, || "independent enclosure meets 0".into())?;
    Ok(None)
}

// 11 --------------------------------------------------------------------

/// Odometer on integers mod 2^depth, least significant digit first.
fn odo_distance(a: u64, b: u64) -> Rational {
    if a == b {
        int(0)
    } else {
        pow2_neg((a ^ b).trailing_zeros())
    }
}

fn symbolic_suite() -> Outcome {
    let depth = 12;
    let modulus = 1u64 << depth;
    let o = OdometerSystem::new(depth).unwrap();
    let s = SystemSpec::Odometer(o);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..10_000 {
        let (a, b) = (rng.gen_range(0..modulus), rng.gen_range(0..modulus));
        let (pa, pb) = (Point::Word(OdometerSystem::from_int(a, depth)), Point::Word(OdometerSystem::from_int(b, depth)));
        let (fa, fb) = (s.eval(&pa).unwrap(), s.eval(&pb).unwrap());
        ensure(fa == Point::Word(OdometerSystem::from_int((a + 1) % modulus, depth)), || format!("f({a}) wrong"))?;
        let d = s.distance(&fa, &fb).unwrap();
        ensure(d == odo_distance(a, b) && d == s.distance(&pa, &pb).unwrap(), || format!("pair {a}, {b} not isometric"))?;
    }
    let eps = pow2_neg(5);
    for t in 0..500 {
        let len = rng.gen_range(2..=20);
        let x0 = Point::Word(OdometerSystem::from_int(rng.gen_range(0..modulus), depth));
        let orbit = perturbed_orbit(&s, &x0, len, &eps, SEED + t).unwrap();
        let xs: Vec<u64> = orbit
            .points
            .iter()
            .map(|p| match p {
                Point::Word(w) => OdometerSystem::to_int(w),
                _ => unreachable!(),
            })
            .collect();
        let m = xs.len() as u64 - 1;
        let y = (xs[m as usize] + modulus - m % modulus) % modulus;
        let tracks = xs.iter().enumerate().all(|(i, &x)| odo_distance((y + i as u64) % modulus, x) <= eps);
        ensure(tracks, || format!("orbit {t}: f^-m(x_m) does not shadow"))?;
        ensure(h_shadow_solve(&s, &orbit, &eps).unwrap().is_feasible(), || format!("orbit {t}: solver finds no shadow"))?;
    }
    let shift = ShiftSystem::golden_mean();
    let live = shift.live_states();
    let g = SystemSpec::Sft(shift.clone());
    let mut infeasible = 0;
    for t in 0..500 {
        let len = rng.gen_range(1..12);
        let (j, k) = (rng.gen_range(0..=5u32), rng.gen_range(0..=5u32));
        let x0 = Point::Seq(shift.extend_random(&[], 6, &live, &mut rng).unwrap());
        let orbit = perturbed_orbit(&g, &x0, len, &pow2_neg(j), SEED + t).unwrap();
        let eps = pow2_neg(k);
        let a = shadow_oracle(&g, &orbit, &eps).unwrap().is_feasible();
        let b = h_shadow_solve(&g, &orbit, &eps).unwrap().is_feasible();
        ensure(a == b, || format!("instance {t}: shadowing {a}, h-shadowing {b}"))?;
        infeasible += usize::from(!a);
    }
    Ok(Some(format!("golden mean: {infeasible} of 500 instances not shadowable")))
}

// 12 --------------------------------------------------------------------

fn schwarzian_values() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for mu in [int(1), rat(5, 4), rat(3, 2), rat(7, 4), int(2)] {
        let f = QuadraticFamilyMap::unimodal(mu.clone()).unwrap();
        for _ in 0..100 {
            let x = Rational::new(rng.gen_range(1..10_000).into(), rng.gen_range(1..10_000).into())
                * if rng.gen_bool(0.5) { int(1) } else { int(-1) };
            let expected = rat(-3, 2) / (&x * &x);
            let got = schwarzian(&f, &x).unwrap();
            ensure(got == expected, || format!("mu={mu}, x={x}: {got}"))?;
        }
    }
    Ok(None)
}

// ----------------------------------------------------------------------

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion { id: 1, title: "Cantor map verdicts and origin identity", limit: secs(10), run: cantor_example },
        Criterion { id: 2, title: "T2 ball expanding, not expanding, not one-to-one", limit: secs(10), run: tent_ball_example },
        Criterion { id: 3, title: "h-shadowing suite for expanding PL maps", limit: secs(120), run: hshadow_suite },
        Criterion { id: 4, title: "oracle against grid search", limit: secs(120), run: oracle_vs_grid },
        Criterion { id: 5, title: "s-limit counterexample", limit: secs(1), run: slimit_example },
        Criterion { id: 6, title: "second iterate against direct h-shadowing", limit: secs(60), run: iterate_equivalence },
        Criterion { id: 7, title: "staged asymptotic shadowing", limit: secs(30), run: staged_construction },
        Criterion { id: 8, title: "region suite for slope 9/5", limit: secs(60), run: pl_region_suite },
        Criterion { id: 9, title: "non-shadowing tent map witness", limit: secs(120), run: nonshadowing_witness },
        Criterion { id: 10, title: "kneading search", limit: secs(120), run: kneading_search },
        Criterion { id: 11, title: "odometer and golden-mean suites", limit: secs(60), run: symbolic_suite },
        Criterion { id: 12, title: "Schwarzian of 1 - mu x^2", limit: secs(1), run: schwarzian_values },
    ]
}

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for c in criteria() {
        if !filter.is_empty() && !filter.iter().any(|f| *f == c.id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|note| {
            ensure(elapsed <= c.limit, || format!("took {:.1}s, limit {}s", elapsed.as_secs_f64(), c.limit.as_secs()))?;
            Ok(note)
        });
        let verdict = if outcome.is_ok() { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} ({:.2}s) {}", c.id, elapsed.as_secs_f64(), c.title);
        match outcome {
            Ok(Some(note)) => println!("    {note}"),
            Ok(None) => {}
            Err(msg) => {
                println!("    {msg}");
                failed.push(c.id);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
