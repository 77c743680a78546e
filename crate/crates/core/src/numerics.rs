//! Exact scalars, closed intervals and finite unions of closed intervals.
//!
//! Every geometric question asked by the solvers (balls, preimages,
//! containment, emptiness) is answered here. The containers are generic over
//! [`Scalar`]; the solvers instantiate them with [`Rational`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Ordered field operations needed by the interval containers.
pub trait Scalar: Clone + PartialOrd + Num + Signed + fmt::Debug {}

impl<T> Scalar for T where T: Clone + PartialOrd + Num + Signed + fmt::Debug {}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("interval bounds out of order")]
    InvertedInterval,
    #[error("affine map with zero slope")]
    ZeroSlope,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("square root of a negative number")]
    NegativeSqrt,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^-k` as an exact rational.
pub fn pow2_neg(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

pub fn pow3_neg(k: u32) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(3), k as usize))
}

/// Canonical `p/q` text form (the denominator is always written).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Result<Rational, NumericsError> {
    let t = s.trim();
    let err = || NumericsError::Parse(s.to_string());
    match t.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(t).map_err(|_| err())?)),
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter for optional rationals.
pub mod opt_rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse_rational(&s).map_err(D::Error::custom)).transpose()
    }
}

/// Serde adapter for lists of rationals.
pub mod vec_rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(format_rational).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rational(s).map_err(D::Error::custom)).collect()
    }
}

fn two<S: Scalar>() -> S {
    S::one() + S::one()
}

fn min_of<S: Scalar>(a: &S, b: &S) -> S {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

fn max_of<S: Scalar>(a: &S, b: &S) -> S {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval<S> {
    lo: S,
    hi: S,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: S, hi: S) -> Result<Self, NumericsError> {
        if lo > hi {
            return Err(NumericsError::InvertedInterval);
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: S) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    /// Closed ball `[center - radius, center + radius]`; negative radii are clamped to zero.
    pub fn ball(center: &S, radius: &S) -> Self {
        let r = if radius.is_negative() { S::zero() } else { radius.clone() };
        Self { lo: center.clone() - r.clone(), hi: center.clone() + r }
    }

    pub fn lo(&self) -> &S {
        &self.lo
    }

    pub fn hi(&self) -> &S {
        &self.hi
    }

    pub fn len(&self) -> S {
        self.hi.clone() - self.lo.clone()
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &S) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint(&self) -> S {
        (self.lo.clone() + self.hi.clone()) / two()
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = max_of(&self.lo, &other.lo);
        let hi = min_of(&self.hi, &other.hi);
        (lo <= hi).then_some(Self { lo, hi })
    }

    /// Image under `x -> slope * x + offset`.
    pub fn affine_image(&self, slope: &S, offset: &S) -> Result<Self, NumericsError> {
        if slope.is_zero() {
            return Err(NumericsError::ZeroSlope);
        }
        let a = slope.clone() * self.lo.clone() + offset.clone();
        let b = slope.clone() * self.hi.clone() + offset.clone();
        Ok(if slope.is_positive() { Self { lo: a, hi: b } } else { Self { lo: b, hi: a } })
    }
}

impl fmt::Display for Interval<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

/// Finite union of pairwise disjoint closed intervals, sorted ascending.
///
/// Canonical form: consecutive parts are separated by a gap of positive
/// length, so touching intervals are always merged.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet<S> {
    parts: Vec<Interval<S>>,
}

pub type RationalIntervalSet = IntervalSet<Rational>;

impl<S: Scalar> Default for IntervalSet<S> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<S: Scalar> IntervalSet<S> {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn single(iv: Interval<S>) -> Self {
        Self { parts: vec![iv] }
    }

    pub fn point(x: S) -> Self {
        Self::single(Interval::point(x))
    }

    /// Canonical form of an arbitrary list of intervals.
    pub fn normalize(raw: impl IntoIterator<Item = Interval<S>>) -> Self {
        let mut v: Vec<Interval<S>> = raw.into_iter().collect();
        v.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(Ordering::Equal));
        let mut parts: Vec<Interval<S>> = Vec::with_capacity(v.len());
        for iv in v {
            match parts.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => parts.push(iv),
            }
        }
        Self { parts }
    }

    /// Builds a set from `(lo, hi)` pairs, rejecting inverted pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (S, S)>) -> Result<Self, NumericsError> {
        let ivs = pairs
            .into_iter()
            .map(|(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::normalize(ivs))
    }

    /// Finite set of points.
    pub fn points(xs: impl IntoIterator<Item = S>) -> Self {
        Self::normalize(xs.into_iter().map(Interval::point))
    }

    pub fn parts(&self) -> &[Interval<S>] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Interval<S>> {
        self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: &S) -> bool {
        // parts are sorted, so binary search on the upper ends
        let idx = self.parts.partition_point(|p| &p.hi < x);
        self.parts.get(idx).is_some_and(|p| p.contains(x))
    }

    pub fn leftmost(&self) -> Option<&S> {
        self.parts.first().map(|p| &p.lo)
    }

    pub fn rightmost(&self) -> Option<&S> {
        self.parts.last().map(|p| &p.hi)
    }

    pub fn hull(&self) -> Option<Interval<S>> {
        Some(Interval { lo: self.leftmost()?.clone(), hi: self.rightmost()?.clone() })
    }

    /// Total length (isolated points contribute zero).
    pub fn measure(&self) -> S {
        self.parts.iter().fold(S::zero(), |acc, p| acc + p.len())
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::normalize(self.parts.iter().chain(other.parts.iter()).cloned())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = (&self.parts, &other.parts);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            if let Some(iv) = a[i].intersect(&b[j]) {
                out.push(iv);
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // pieces of disjoint inputs can only touch when an input had touching parts
        Self::normalize(out)
    }

    pub fn intersect_interval(&self, iv: &Interval<S>) -> Self {
        self.intersect(&Self::single(iv.clone()))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.parts.iter().all(|p| {
            let idx = other.parts.partition_point(|q| q.hi < p.lo);
            other.parts.get(idx).is_some_and(|q| q.lo <= p.lo && p.hi <= q.hi)
        })
    }

    /// Exact image under `x -> slope * x + offset`.
    pub fn affine_image(&self, slope: &S, offset: &S) -> Result<Self, NumericsError> {
        let ivs = self
            .parts
            .iter()
            .map(|p| p.affine_image(slope, offset))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::normalize(ivs))
    }

    /// Distance from `x` to the set, `None` for the empty set.
    pub fn distance_to(&self, x: &S) -> Option<S> {
        self.parts
            .iter()
            .map(|p| {
                if x < &p.lo {
                    p.lo.clone() - x.clone()
                } else if x > &p.hi {
                    x.clone() - p.hi.clone()
                } else {
                    S::zero()
                }
            })
            .reduce(|a, b| min_of(&a, &b))
    }

    /// Some point of `self` lying outside `other`, if one exists.
    pub fn point_outside(&self, other: &Self) -> Option<S> {
        for p in &self.parts {
            let idx = other.parts.partition_point(|q| q.hi < p.lo);
            match other.parts.get(idx) {
                Some(q) if q.lo <= p.lo => {
                    if q.hi >= p.hi {
                        continue;
                    }
                    // midpoint of the gap after q, clipped to p
                    let next = other
                        .parts
                        .get(idx + 1)
                        .map(|r| min_of(&r.lo, &p.hi))
                        .unwrap_or_else(|| p.hi.clone());
                    return Some((q.hi.clone() + next) / two());
                }
                _ => return Some(p.lo.clone()),
            }
        }
        None
    }

    /// Inflates every part by `radius` on both sides.
    pub fn inflate(&self, radius: &S) -> Self {
        Self::normalize(self.parts.iter().map(|p| Interval {
            lo: p.lo.clone() - radius.clone(),
            hi: p.hi.clone() + radius.clone(),
        }))
    }
}

pub type FloatIntervalSet = IntervalSet<f64>;

impl fmt::Display for RationalIntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for RationalIntervalSet {
    fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        let pairs: Vec<[String; 2]> = self
            .parts
            .iter()
            .map(|p| [format_rational(&p.lo), format_rational(&p.hi)])
            .collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalIntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs = Vec::<[String; 2]>::deserialize(d)?;
        let parsed = pairs
            .iter()
            .map(|[a, b]| Ok((parse_rational(a)?, parse_rational(b)?)))
            .collect::<Result<Vec<_>, NumericsError>>()
            .map_err(D::Error::custom)?;
        Self::from_pairs(parsed).map_err(D::Error::custom)
    }
}

/// Largest dyadic `k / 2^bits` not above `r`.
pub fn round_down(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = r.numer() * &scale;
    Rational::new(scaled.div_floor(r.denom()), scale)
}

/// Smallest dyadic `k / 2^bits` not below `r`.
pub fn round_up(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = r.numer() * &scale;
    Rational::new(scaled.div_ceil(r.denom()), scale)
}

/// Dyadic enclosure `lo <= sqrt(r) <= hi` with `hi - lo <= 2^-bits`.
pub fn sqrt_enclosure(r: &Rational, bits: u32) -> Result<(Rational, Rational), NumericsError> {
    if r.is_negative() {
        return Err(NumericsError::NegativeSqrt);
    }
    if r.is_zero() {
        return Ok((Rational::zero(), Rational::zero()));
    }
    // floor(sqrt(r) * 2^bits) = floor(sqrt(floor(r * 4^bits)))
    let scaled = (r.numer() << (2 * bits)).div_floor(r.denom());
    let s = scaled.sqrt();
    let scale = BigInt::one() << bits;
    let lo = Rational::new(s.clone(), scale.clone());
    let hi = if &s * &s == scaled && (r.numer() << (2 * bits)).is_multiple_of(r.denom()) {
        lo.clone()
    } else {
        Rational::new(s + 1, scale)
    };
    Ok((lo, hi))
}

/// Rational interval with outward dyadic rounding, used where exact
/// arithmetic would blow up (long orbits of quadratic maps).
#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
    pub bits: u32,
}

impl Enclosure {
    pub fn exact(x: Rational, bits: u32) -> Self {
        Self { lo: x.clone(), hi: x, bits }
    }

    fn rounded(lo: Rational, hi: Rational, bits: u32) -> Self {
        Self { lo: round_down(&lo, bits), hi: round_up(&hi, bits), bits }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Sign relative to `c`: `Some(Less)` when entirely below, `None` when `c` is inside.
    pub fn compare_to(&self, c: &Rational) -> Option<Ordering> {
        if &self.hi < c {
            Some(Ordering::Less)
        } else if &self.lo > c {
            Some(Ordering::Greater)
        } else if self.lo == self.hi {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn square(&self) -> Self {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        let (lo, hi) = if self.lo.is_negative() && self.hi.is_positive() {
            (Rational::zero(), if a > b { a } else { b })
        } else if a <= b {
            (a, b)
        } else {
            (b, a)
        };
        Self::rounded(lo, hi, self.bits)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let a = k * &self.lo;
        let b = k * &self.hi;
        if a <= b {
            Self::rounded(a, b, self.bits)
        } else {
            Self::rounded(b, a, self.bits)
        }
    }

    pub fn neg_add(&self, c: &Rational) -> Self {
        // c - self
        Self::rounded(c - &self.hi, c - &self.lo, self.bits)
    }

    pub fn add_const(&self, c: &Rational) -> Self {
        Self::rounded(&self.lo + c, &self.hi + c, self.bits)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().cloned().unwrap_or_default();
        let hi = cands.iter().max().cloned().unwrap_or_default();
        Self::rounded(lo, hi, self.bits)
    }
}

/// Exact sign helper used by symbolic code.
pub fn sign_of(r: &Rational) -> Sign {
    if r.is_zero() {
        Sign::NoSign
    } else if r.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub fn min_rat(a: &Rational, b: &Rational) -> Rational {
    min_of(a, b)
}

pub fn max_rat(a: &Rational, b: &Rational) -> Rational {
    max_of(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(pairs: &[(i64, i64, i64, i64)]) -> RationalIntervalSet {
        IntervalSet::from_pairs(pairs.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d)))).unwrap()
    }

    #[test]
    fn normalize_merges_overlapping_and_touching() {
        assert_eq!(set(&[(0, 1, 1, 2), (1, 4, 3, 4)]), set(&[(0, 1, 3, 4)]));
        assert_eq!(set(&[(0, 1, 1, 3), (1, 3, 1, 1)]), set(&[(0, 1, 1, 1)]));
        assert!(RationalIntervalSet::normalize(Vec::new()).is_empty());
    }

    #[test]
    fn inverted_interval_rejected() {
        assert_eq!(Interval::new(int(1), int(0)), Err(NumericsError::InvertedInterval));
        assert!(RationalIntervalSet::from_pairs([(int(1), int(0))]).is_err());
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(set(&[(0, 1, 1, 2)]).intersect(&set(&[(1, 4, 1, 1)])), set(&[(1, 4, 1, 2)]));
        assert_eq!(
            set(&[(0, 1, 1, 4), (1, 2, 1, 1)]).intersect(&set(&[(1, 8, 5, 8)])),
            set(&[(1, 8, 1, 4), (1, 2, 5, 8)])
        );
        assert!(set(&[(0, 1, 1, 1)]).intersect(&RationalIntervalSet::empty()).is_empty());
    }

    #[test]
    fn affine_image_examples() {
        let unit = set(&[(0, 1, 1, 1)]);
        assert_eq!(unit.affine_image(&int(3), &int(2)).unwrap(), set(&[(2, 1, 5, 1)]));
        assert_eq!(
            set(&[(2, 27, 1, 9)]).affine_image(&int(9), &int(0)).unwrap(),
            set(&[(2, 3, 1, 1)])
        );
        assert_eq!(unit.affine_image(&int(-2), &int(2)).unwrap(), set(&[(0, 1, 2, 1)]));
        assert_eq!(unit.affine_image(&int(0), &int(1)), Err(NumericsError::ZeroSlope));
    }

    #[test]
    fn rational_text_roundtrip() {
        assert_eq!(format_rational(&rat(-6, 8)), "-3/4");
        assert_eq!(format_rational(&int(2)), "2/1");
        assert_eq!(parse_rational("6/-8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("5").unwrap(), int(5));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        let s = set(&[(0, 1, 1, 2), (3, 4, 1, 1)]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"[["0/1","1/2"],["3/4","1/1"]]"#);
        let back: RationalIntervalSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn point_outside_finds_gap() {
        let a = set(&[(0, 1, 1, 1)]);
        let b = set(&[(0, 1, 1, 4), (1, 2, 1, 1)]);
        let p = a.point_outside(&b).unwrap();
        assert!(a.contains(&p) && !b.contains(&p));
        assert_eq!(b.point_outside(&a), None);
        assert_eq!(a.point_outside(&RationalIntervalSet::empty()), Some(int(0)));
    }

    #[test]
    fn sqrt_enclosure_brackets() {
        let (lo, hi) = sqrt_enclosure(&int(2), 40).unwrap();
        assert!(&lo * &lo <= int(2) && &hi * &hi >= int(2));
        assert!(&hi - &lo <= pow2_neg(40));
        let (lo, hi) = sqrt_enclosure(&rat(9, 4), 10).unwrap();
        assert_eq!((lo, hi), (rat(3, 2), rat(3, 2)));
    }

    #[test]
    fn enclosure_square_straddling_zero() {
        let e = Enclosure { lo: rat(-1, 2), hi: rat(1, 4), bits: 16 };
        let sq = e.square();
        assert_eq!(sq.lo, int(0));
        assert_eq!(sq.hi, rat(1, 4));
    }

    #[test]
    fn generic_over_float() {
        let s = FloatIntervalSet::from_pairs([(0.0, 0.5), (0.25, 0.75)]).unwrap();
        assert_eq!(s.parts().len(), 1);
        assert!((s.measure() - 0.75).abs() < 1e-12);
    }

    fn small_set() -> impl Strategy<Value = RationalIntervalSet> {
        prop::collection::vec((0i64..32, 0i64..8), 0..5).prop_map(|v| {
            IntervalSet::normalize(
                v.into_iter().map(|(a, w)| Interval::new(rat(a, 32), rat(a + w, 32)).unwrap()),
            )
        })
    }

    proptest! {
        #[test]
        fn normalize_idempotent(s in small_set()) {
            prop_assert_eq!(IntervalSet::normalize(s.parts().to_vec()), s);
        }

        #[test]
        fn intersect_laws(a in small_set(), b in small_set(), c in small_set()) {
            let ab = a.intersect(&b);
            prop_assert_eq!(&ab, &b.intersect(&a));
            prop_assert_eq!(ab.intersect(&c), a.intersect(&b.intersect(&c)));
            prop_assert!(ab.is_subset_of(&a) && ab.is_subset_of(&b));
            prop_assert!(ab.measure() <= a.measure() && ab.measure() <= b.measure());
            let big = a.union(&c);
            prop_assert!(a.intersect(&b).is_subset_of(&big.intersect(&b)));
            for k in 0..=80 {
                let x = rat(k, 64);
                prop_assert_eq!(ab.contains(&x), a.contains(&x) && b.contains(&x));
            }
        }

        #[test]
        fn affine_distributes(a in small_set(), b in small_set(), s in -4i64..4, o in -3i64..3) {
            prop_assume!(s != 0);
            let (s, o) = (rat(s, 3), rat(o, 5));
            let img = |x: &RationalIntervalSet| x.affine_image(&s, &o).unwrap();
            prop_assert_eq!(img(&a.union(&b)), img(&a).union(&img(&b)));
            prop_assert_eq!(img(&a.intersect(&b)), img(&a).intersect(&img(&b)));
        }
    }
}
