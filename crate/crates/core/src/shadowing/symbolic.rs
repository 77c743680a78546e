//! Shadowing on shift spaces and the odometer, where a tube of radius ε is a
//! cylinder: the first `K` symbols are fixed, `K` the least integer with
//! `2^-K <= ε`.

use std::collections::HashMap;

use crate::numerics::Rational;
use crate::pseudo_orbits::{deviation, prefix_for_radius, PseudoOrbit};
use crate::systems::{OdometerSystem, Point, ShiftPoint, ShiftSystem, SystemError, SystemSpec};

use super::{FeasibleSet, ShadowCertificate, ShadowError, ShadowMode, Verdict};

fn seqs(orbit: &PseudoOrbit) -> Result<Vec<&ShiftPoint>, ShadowError> {
    orbit
        .points
        .iter()
        .map(|p| match p {
            Point::Seq(s) => Ok(s),
            _ => Err(ShadowError::System(SystemError::MixedPoints)),
        })
        .collect()
}

fn words(orbit: &PseudoOrbit) -> Result<Vec<&[u8]>, ShadowError> {
    orbit
        .points
        .iter()
        .map(|p| match p {
            Point::Word(w) => Ok(w.as_slice()),
            _ => Err(ShadowError::System(SystemError::MixedPoints)),
        })
        .collect()
}

/// The word every shadowing point must begin with: symbol `i + t` is the
/// `t`-th symbol of `x_i`. `None` on conflicting requirements.
fn forced_word(points: &[&ShiftPoint], k: usize) -> Option<Vec<u8>> {
    if points.is_empty() || k == 0 {
        return Some(Vec::new());
    }
    let mut word: Vec<Option<u8>> = vec![None; points.len() + k - 1];
    for (i, p) in points.iter().enumerate() {
        for t in 0..k {
            let s = p.symbol(t);
            match word[i + t] {
                Some(prev) if prev != s => return None,
                _ => word[i + t] = Some(s),
            }
        }
    }
    Some(word.into_iter().map(|s| s.expect("every position is covered")).collect())
}

pub(super) fn oracle(
    system: &SystemSpec,
    orbit: &PseudoOrbit,
    epsilon: &Rational,
) -> Result<ShadowCertificate, ShadowError> {
    let mut cert = ShadowCertificate::new(ShadowMode::Oracle, epsilon);
    let k = prefix_for_radius(epsilon);
    match system {
        SystemSpec::Sft(shift) => {
            let points = seqs(orbit)?;
            let live = shift.live_states();
            let Some(word) = forced_word(&points, k) else { return Ok(cert) };
            if !shift.extendable(&word, &live) {
                return Ok(cert);
            }
            let y = shift.extend_greedy(&word, &live).expect("extendable word closes");
            finish(system, orbit, &mut cert, Point::Seq(y))?;
            cert.feasible = FeasibleSet::Cylinder(word);
        }
        SystemSpec::Odometer(o) => {
            let xs = words(orbit)?;
            let k = k.min(o.depth());
            let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
            let residue = |i: usize| o.iterate(xs[i], -(i as i64));
            let r = OdometerSystem::to_int(&residue(0)) & mask;
            if (1..xs.len()).any(|i| OdometerSystem::to_int(&residue(i)) & mask != r) {
                return Ok(cert);
            }
            let y = OdometerSystem::from_int(r, o.depth());
            cert.feasible = FeasibleSet::Cylinder(y[..k].to_vec());
            finish(system, orbit, &mut cert, Point::Word(y))?;
        }
        _ => return Err(ShadowError::Unsupported(system.kind())),
    }
    Ok(cert)
}

fn finish(
    system: &SystemSpec,
    orbit: &PseudoOrbit,
    cert: &mut ShadowCertificate,
    y: Point,
) -> Result<(), ShadowError> {
    cert.report = Some(deviation(system, &y, orbit)?);
    cert.witness = Some(y);
    cert.verdict = Verdict::Yes;
    Ok(())
}

/// Leading state -> (prepended symbol, state it came from).
type Layer = HashMap<Vec<u8>, (u8, Vec<u8>)>;

/// Some allowed word `w` of length `len` with `w · tail` allowed, preferring
/// small symbols at the front.
fn allowed_prefix(shift: &ShiftSystem, len: usize, tail: &ShiftPoint) -> Option<Vec<u8>> {
    let memory = shift.memory();
    let head = tail.prefix(memory);
    // layer j: reachable leading states after prepending j symbols, with the symbol used
    let mut layers: Vec<Layer> = Vec::with_capacity(len);
    let mut current: Vec<Vec<u8>> = vec![head];
    for _ in 0..len {
        let mut next: Layer = HashMap::new();
        for state in &current {
            for a in 0..shift.symbols() {
                let mut w = vec![a];
                w.extend_from_slice(state);
                if !shift.word_allowed(&w) {
                    continue;
                }
                w.truncate(memory);
                next.entry(w).or_insert((a, state.clone()));
            }
        }
        if next.is_empty() {
            return None;
        }
        current = next.keys().cloned().collect();
        current.sort();
        layers.push(next);
    }
    let mut state = current.into_iter().next()?;
    let mut word = Vec::with_capacity(len);
    for layer in layers.iter().rev() {
        let (a, prev) = layer[&state].clone();
        word.push(a);
        state = prev;
    }
    Some(word)
}

pub(super) fn h_shadow(
    system: &SystemSpec,
    orbit: &PseudoOrbit,
    epsilon: &Rational,
) -> Result<ShadowCertificate, ShadowError> {
    let mut cert = ShadowCertificate::new(ShadowMode::HShadow, epsilon);
    let k = prefix_for_radius(epsilon);
    let m = orbit.last_index();
    match system {
        SystemSpec::Sft(shift) => {
            let points = seqs(orbit)?;
            let last = points[m];
            if !shift.contains(last) {
                return Ok(cert);
            }
            let prefix = if k == 0 {
                match allowed_prefix(shift, m, last) {
                    Some(w) => w,
                    None => return Ok(cert),
                }
            } else {
                let Some(word) = forced_word(&points[..m], k) else { return Ok(cert) };
                let overlap = word.len().saturating_sub(m);
                if word[m.min(word.len())..] != last.prefix(overlap)[..] {
                    return Ok(cert);
                }
                word[..m].to_vec()
            };
            let mut check = prefix.clone();
            check.extend(last.prefix(shift.window()));
            if !shift.word_allowed(&check) {
                return Ok(cert);
            }
            let y = last.prepend(&prefix);
            cert.feasible = FeasibleSet::Cylinder(prefix);
            finish(system, orbit, &mut cert, Point::Seq(y))?;
        }
        SystemSpec::Odometer(o) => {
            let xs = words(orbit)?;
            let y = o.iterate(xs[m], -(m as i64));
            let report = deviation(system, &Point::Word(y.clone()), orbit)?;
            if report.per_step.iter().any(|d| d > epsilon) {
                return Ok(cert);
            }
            cert.feasible = FeasibleSet::Cylinder(y.clone());
            cert.report = Some(report);
            cert.witness = Some(Point::Word(y));
            cert.verdict = Verdict::Yes;
        }
        _ => return Err(ShadowError::Unsupported(system.kind())),
    }
    Ok(cert)
}
