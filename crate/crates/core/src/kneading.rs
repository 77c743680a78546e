//! Itineraries and kneading words of unimodal maps, the parity-lexicographic
//! order, parameter search in the family `1 - mu x^2`, and the generator for
//! the block sequence `R L L (R^2 L) (R^3 L) ...`.
//!
//! Maps are assumed to have a maximum at the critical point, so orientation
//! flips after every `R`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::numerics::{format_rational, int, round_down, Rational};
use crate::pseudo_orbits::{OrbitError, PseudoOrbit};
use crate::systems::{QuadraticFamilyMap, SystemError, SystemSpec};

/// Starting precision of enclosure iteration, in bits.
pub const WORKING_BITS: u32 = 512;
/// Precision at which an undecided comparison gives up.
pub const PRECISION_CAP: u32 = 8192;
/// Rational orbits are iterated exactly while numerator and denominator fit in this many bits.
const EXACT_BITS: u64 = 512;
const GRID_POINTS: i64 = 100;

#[derive(Debug, Error)]
pub enum KneadingError {
    #[error("map is not unimodal: {0}")]
    NotUnimodal(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid symbol {0:?}")]
    Symbol(char),
    #[error("kneading data not monotone between mu = {0} and mu = {1}")]
    NotMonotone(String, String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    L,
    C,
    R,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::L => 'L',
            Symbol::C => 'C',
            Symbol::R => 'R',
        }
    }

    fn rank(self) -> u8 {
        match self {
            Symbol::L => 0,
            Symbol::C => 1,
            Symbol::R => 2,
        }
    }

    fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => Symbol::L,
            Ordering::Equal => Symbol::C,
            Ordering::Greater => Symbol::R,
        }
    }
}

impl TryFrom<char> for Symbol {
    type Error = KneadingError;

    fn try_from(c: char) -> Result<Self, KneadingError> {
        match c {
            'L' => Ok(Symbol::L),
            'C' => Ok(Symbol::C),
            'R' => Ok(Symbol::R),
            other => Err(KneadingError::Symbol(other)),
        }
    }
}

/// Finite itinerary. Shorter than `horizon` when it stopped at a critical
/// hit (last symbol `C`) or at a comparison that stayed undecided at the
/// precision cap (`undetermined` set).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KneadingWord {
    pub symbols: Vec<Symbol>,
    pub horizon: usize,
    pub undetermined: bool,
}

impl KneadingWord {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        let horizon = symbols.len();
        Self { symbols, horizon, undetermined: false }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn prefix(&self, n: usize) -> KneadingWord {
        let n = n.min(self.len());
        Self { symbols: self.symbols[..n].to_vec(), horizon: n, undetermined: self.undetermined && n == self.len() }
    }

    /// Whether the word was computed to its full horizon.
    pub fn is_complete(&self) -> bool {
        !self.undetermined && (self.len() == self.horizon || self.symbols.last() == Some(&Symbol::C))
    }
}

impl fmt::Display for KneadingWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{}", s.as_char())?;
        }
        if self.undetermined {
            write!(f, "?")?;
        }
        Ok(())
    }
}

impl FromStr for KneadingWord {
    type Err = KneadingError;

    fn from_str(s: &str) -> Result<Self, KneadingError> {
        let symbols = s.trim().chars().map(Symbol::try_from).collect::<Result<Vec<_>, _>>()?;
        if let Some(i) = symbols.iter().position(|&s| s == Symbol::C) {
            if i + 1 != symbols.len() {
                return Err(KneadingError::Precondition("C may only be the last symbol".into()));
            }
        }
        Ok(Self::new(symbols))
    }
}

impl Serialize for KneadingWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A unimodal map the itinerary code can iterate.
enum Unimodal<'a> {
    Quadratic(&'a QuadraticFamilyMap),
    Pl(&'a SystemSpec),
}

fn unimodal(system: &SystemSpec) -> Result<(Unimodal<'_>, Rational), KneadingError> {
    match system {
        SystemSpec::Quadratic(q) => Ok((Unimodal::Quadratic(q), q.critical_point())),
        SystemSpec::Pl(_) => {
            let crit = system.critical_reals();
            match crit.as_slice() {
                [c] => Ok((Unimodal::Pl(system), c.clone())),
                _ => Err(KneadingError::NotUnimodal(format!("{} critical points", crit.len()))),
            }
        }
        other => Err(KneadingError::NotUnimodal(format!("{} system", other.kind()))),
    }
}

fn rational_bits(x: &Rational) -> u64 {
    x.numer().bits() + x.denom().bits()
}

/// Interval `[lo, hi] / 2^bits` with outward rounding, kept as scaled
/// integers so long orbits avoid rational normalisation.
struct Dyadic {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

fn scaled_floor(x: &Rational, bits: u32) -> BigInt {
    (x.numer() << bits).div_floor(x.denom())
}

fn scaled_ceil(x: &Rational, bits: u32) -> BigInt {
    (x.numer() << bits).div_ceil(x.denom())
}

impl Dyadic {
    fn new(x: &Rational, bits: u32) -> Self {
        Self { lo: scaled_floor(x, bits), hi: scaled_ceil(x, bits), bits }
    }

    /// Image under `peak - width (x - c)^2`.
    fn step(&self, q: &QuadraticFamilyMap) -> Self {
        let b = self.bits;
        let c = q.critical_point();
        let dlo = &self.lo - scaled_ceil(&c, b);
        let dhi = &self.hi - scaled_floor(&c, b);
        let (alo, ahi) = (dlo.abs(), dhi.abs());
        let big = std::cmp::max(&alo, &ahi);
        let small = if dlo.is_negative() && dhi.is_positive() { BigInt::zero() } else { std::cmp::min(&alo, &ahi).clone() };
        // squares carry scale 2^(2b); the width p/q is folded into one division
        let (p, den) = (q.parameter.numer(), q.parameter.denom() << b);
        let sq_lo = (&small * &small * p).div_floor(&den);
        let sq_hi = (big * big * p).div_ceil(&den);
        let peak = q.eval(&c);
        Self { lo: scaled_floor(&peak, b) - sq_hi, hi: scaled_ceil(&peak, b) - sq_lo, bits: b }
    }

    fn compare_to(&self, c: &Rational) -> Option<Ordering> {
        if self.hi < scaled_floor(c, self.bits) {
            Some(Ordering::Less)
        } else if self.lo > scaled_ceil(c, self.bits) {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    fn lo(&self) -> Rational {
        Rational::new(self.lo.clone(), BigInt::one() << self.bits)
    }

    fn hi(&self) -> Rational {
        Rational::new(self.hi.clone(), BigInt::one() << self.bits)
    }
}

/// Itinerary of `x` at one precision; the flag is false when a comparison stayed undecided.
fn quadratic_itinerary(q: &QuadraticFamilyMap, x: &Rational, n: usize, bits: u32) -> (Vec<Symbol>, bool) {
    let c = q.critical_point();
    let mut out = Vec::with_capacity(n);
    let mut exact = Some(x.clone());
    let mut enc = Dyadic::new(x, bits);
    while out.len() < n {
        let sym = match &exact {
            Some(v) => Symbol::from_ordering(v.cmp(&c)),
            None => match enc.compare_to(&c) {
                Some(o) => Symbol::from_ordering(o),
                None => return (out, false),
            },
        };
        out.push(sym);
        if sym == Symbol::C {
            break;
        }
        exact = match exact.take() {
            Some(v) => {
                let next = q.eval(&v);
                if rational_bits(&next) > EXACT_BITS {
                    enc = Dyadic::new(&next, bits);
                    None
                } else {
                    Some(next)
                }
            }
            None => {
                enc = enc.step(q);
                None
            }
        };
    }
    (out, true)
}

/// First `n` symbols of the itinerary of `x`; stops after a `C`.
pub fn itinerary(system: &SystemSpec, x: &Rational, n: usize) -> Result<KneadingWord, KneadingError> {
    if n == 0 {
        return Err(KneadingError::Precondition("itinerary length must be at least 1".into()));
    }
    let (map, c) = unimodal(system)?;
    match map {
        Unimodal::Pl(s) => {
            let mut out = Vec::with_capacity(n);
            let mut v = x.clone();
            while out.len() < n {
                let sym = Symbol::from_ordering(v.cmp(&c));
                out.push(sym);
                if sym == Symbol::C {
                    break;
                }
                v = s.eval_real(&v)?;
            }
            Ok(KneadingWord { symbols: out, horizon: n, undetermined: false })
        }
        Unimodal::Quadratic(q) => {
            if !q.domain().contains(x) {
                return Err(SystemError::OutOfDomain(format_rational(x)).into());
            }
            let mut bits = WORKING_BITS;
            loop {
                let (symbols, decided) = quadratic_itinerary(q, x, n, bits);
                if decided || bits >= PRECISION_CAP {
                    return Ok(KneadingWord { symbols, horizon: n, undetermined: !decided });
                }
                bits *= 2;
            }
        }
    }
}

/// Itinerary of the critical value.
pub fn kneading(system: &SystemSpec, n: usize) -> Result<KneadingWord, KneadingError> {
    let (_, c) = unimodal(system)?;
    let value = system.eval_real(&c)?;
    itinerary(system, &value, n)
}

/// Symbol `n` of `R L L (R^2 L) (R^3 L) (R^4 L) ...`.
pub fn k_generator(n: usize) -> Symbol {
    const HEAD: [Symbol; 3] = [Symbol::R, Symbol::L, Symbol::L];
    if n < HEAD.len() {
        return HEAD[n];
    }
    let mut rest = n - HEAD.len();
    let mut run = 2;
    while rest > run {
        rest -= run + 1;
        run += 1;
    }
    if rest < run {
        Symbol::R
    } else {
        Symbol::L
    }
}

/// The first `n` symbols of the generated sequence.
pub fn k_word(n: usize) -> KneadingWord {
    KneadingWord::new((0..n).map(k_generator).collect())
}

/// Whether the length-`window` prefix occurs again starting at an index at least 1.
pub fn is_recurrent_prefix(word: &KneadingWord, window: usize) -> Result<bool, KneadingError> {
    if window > word.len() {
        return Err(KneadingError::Precondition(format!("window {window} exceeds word length {}", word.len())));
    }
    if window == 0 {
        return Ok(true);
    }
    let s = &word.symbols;
    Ok((1..=s.len() - window).any(|i| s[i..i + window] == s[..window]))
}

/// Lexicographic order with the comparison reversed after an odd number of
/// `R`s. Words agreeing on their common length compare equal.
pub fn parity_lex_compare(a: &KneadingWord, b: &KneadingWord) -> Ordering {
    let mut flipped = false;
    for (x, y) in a.symbols.iter().zip(&b.symbols) {
        if x != y {
            let o = x.rank().cmp(&y.rank());
            return if flipped { o.reverse() } else { o };
        }
        if *x == Symbol::R {
            flipped = !flipped;
        }
    }
    Ordering::Equal
}

fn family(mu: &Rational) -> Result<SystemSpec, KneadingError> {
    Ok(SystemSpec::Quadratic(QuadraticFamilyMap::unimodal(mu.clone())?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParameterSearch {
    #[serde(with = "crate::numerics::rational_serde")]
    pub mu: Rational,
    #[serde(with = "crate::numerics::rational_serde")]
    pub bracket_lo: Rational,
    #[serde(with = "crate::numerics::rational_serde")]
    pub bracket_hi: Rational,
    /// Kneading word of `mu` at the horizon.
    pub achieved: KneadingWord,
    pub target: KneadingWord,
    pub horizon: usize,
    /// `achieved` equals the target prefix at the horizon.
    pub matched: bool,
    pub steps: usize,
    /// A comparison could not be decided at the precision cap; bisection stopped early.
    pub undetermined: bool,
}

impl ParameterSearch {
    pub fn width(&self) -> Rational {
        &self.bracket_hi - &self.bracket_lo
    }

    pub fn to_json(&self) -> Value {
        json!({
            "mu": format_rational(&self.mu),
            "bracket": [format_rational(&self.bracket_lo), format_rational(&self.bracket_hi)],
            "width": format_rational(&self.width()),
            "achieved": self.achieved.to_string(),
            "target": self.target.to_string(),
            "horizon": self.horizon,
            "matched": self.matched,
            "steps": self.steps,
            "undetermined": self.undetermined,
            "continuation": "symbols past the printed 15-symbol prefix follow the generator's block pattern",
        })
    }
}

/// Checks that kneading words at `GRID_POINTS + 1` evenly spaced parameters
/// in `[1, 2]` are weakly increasing. Undetermined words are skipped.
pub fn validate_monotone_grid(n: usize) -> Result<(), KneadingError> {
    let mut prev: Option<(Rational, KneadingWord)> = None;
    for i in 0..=GRID_POINTS {
        let mu = int(1) + Rational::new(BigInt::from(i), BigInt::from(GRID_POINTS));
        let word = kneading(&family(&mu)?, n)?;
        if word.undetermined {
            continue;
        }
        if let Some((pmu, pword)) = &prev {
            if parity_lex_compare(pword, &word) == Ordering::Greater {
                return Err(KneadingError::NotMonotone(format_rational(pmu), format_rational(&mu)));
            }
        }
        prev = Some((mu, word));
    }
    Ok(())
}

/// Bisection on `mu` in `[1, 2]` for the family `1 - mu x^2`, comparing the
/// kneading word over the whole target against the target. A tie moves the
/// lower end up. The returned `mu` is the midpoint of the final bracket, or
/// the last evaluated midpoint that matched at the horizon when the final
/// midpoint does not.
pub fn find_parameter(target: &KneadingWord, horizon: usize, steps: usize) -> Result<ParameterSearch, KneadingError> {
    if horizon == 0 || horizon > target.len() {
        return Err(KneadingError::Precondition(format!(
            "horizon {horizon} must lie in 1..={}",
            target.len()
        )));
    }
    let n = target.len();
    validate_monotone_grid(n)?;
    let goal = target.prefix(horizon);
    let (mut lo, mut hi) = (int(1), int(2));
    let mut last_match: Option<(Rational, KneadingWord)> = None;
    let mut undetermined = false;
    let mut done = 0;
    for _ in 0..steps {
        let mid = (&lo + &hi) / int(2);
        let word = kneading(&family(&mid)?, n)?;
        let at_horizon = word.prefix(horizon);
        if at_horizon == goal {
            last_match = Some((mid.clone(), at_horizon));
        }
        match parity_lex_compare(&word, target) {
            Ordering::Greater => hi = mid,
            Ordering::Less => lo = mid,
            Ordering::Equal if word.undetermined => {
                undetermined = true;
                break;
            }
            Ordering::Equal => lo = mid,
        }
        done += 1;
    }
    let mid = (&lo + &hi) / int(2);
    let mut mu = mid.clone();
    let mut achieved = kneading(&family(&mid)?, horizon)?;
    if achieved != goal {
        if let Some((m, w)) = last_match {
            mu = m;
            achieved = w;
        }
    }
    Ok(ParameterSearch {
        matched: achieved == goal,
        mu,
        bracket_lo: lo,
        bracket_hi: hi,
        achieved,
        target: target.clone(),
        horizon,
        steps: done,
        undetermined,
    })
}

/// Smallest lower bound of `|f^n(c)|` for `first <= n <= last` along the
/// critical orbit of `1 - mu x^2`, computed with outward-rounded
/// enclosures. `None` when some enclosure contains 0.
pub fn critical_orbit_clearance(mu: &Rational, first: usize, last: usize, bits: u32) -> Result<Option<Rational>, KneadingError> {
    let q = QuadraticFamilyMap::unimodal(mu.clone())?;
    let mut e = Dyadic::new(&q.critical_point(), bits);
    let mut best: Option<Rational> = None;
    for n in 1..=last {
        e = e.step(&q);
        if n < first {
            continue;
        }
        let gap = if e.lo.is_positive() {
            e.lo()
        } else if e.hi.is_negative() {
            -e.hi()
        } else {
            return Ok(None);
        };
        best = Some(match best {
            Some(b) if b <= gap => b,
            _ => gap,
        });
    }
    Ok(best)
}

/// `0, 1, f(1) + push, ...` for `1 - mu x^2`, continued by images rounded
/// down to `bits` bits. The only jump above `2^-bits` is `|push|` at index 2.
pub fn critical_pseudo_orbit(mu: &Rational, push: &Rational, len: usize, bits: u32) -> Result<PseudoOrbit, KneadingError> {
    let q = QuadraticFamilyMap::unimodal(mu.clone())?;
    let mut xs = vec![int(0), int(1)];
    let mut x = q.eval(&int(1)) + push;
    while xs.len() < len {
        xs.push(x.clone());
        x = round_down(&q.eval(&x), bits);
    }
    xs.truncate(len.max(1));
    Ok(PseudoOrbit::from_reals(xs)?)
}
