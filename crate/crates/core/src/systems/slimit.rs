use num_traits::{One, Zero};

use crate::numerics::{int, pow2_neg, sqrt_enclosure, Interval, Rational, RationalIntervalSet};

use super::SystemError;

/// `[0, 1]` plus the isolated points `-1/2^n` (`1 <= n <= tail_depth`),
/// under the homeomorphism `x -> x^2` on `[0, 1]` and the identity elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SLimitSystem {
    tail_depth: u32,
}

impl SLimitSystem {
    pub fn new(tail_depth: u32) -> Result<Self, SystemError> {
        if tail_depth == 0 || tail_depth > 4096 {
            return Err(SystemError::Invalid("tail depth must be in 1..=4096".into()));
        }
        Ok(Self { tail_depth })
    }

    pub fn tail_depth(&self) -> u32 {
        self.tail_depth
    }

    pub fn tail_point(n: u32) -> Rational {
        -pow2_neg(n)
    }

    pub fn space(&self) -> RationalIntervalSet {
        let unit = RationalIntervalSet::from_pairs([(int(0), int(1))]).expect("ordered");
        unit.union(&RationalIntervalSet::points((1..=self.tail_depth).map(Self::tail_point)))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        if *x >= int(0) {
            return *x <= int(1);
        }
        // -1/2^n: numerator -1, denominator a power of two within range
        let d = x.denom();
        x.numer() == &(-num_bigint::BigInt::one())
            && (d & (d - 1u32)).is_zero()
            && d.bits() >= 2
            && d.bits() - 1 <= u64::from(self.tail_depth)
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational, SystemError> {
        if !self.contains(x) {
            return Err(SystemError::OutOfDomain(format!("{x} is not in the space")));
        }
        Ok(if *x >= int(0) { x * x } else { x.clone() })
    }

    /// `(outer, inner)` preimage enclosures with `2^-bits` endpoint error.
    pub fn preimage_bounds(
        &self,
        target: &RationalIntervalSet,
        bits: u32,
    ) -> (RationalIntervalSet, RationalIntervalSet) {
        let tail = RationalIntervalSet::points((1..=self.tail_depth).map(Self::tail_point));
        let fixed = target.intersect(&tail);
        let unit = Interval::new(int(0), int(1)).expect("ordered");
        let (mut outer, mut inner) = (Vec::new(), Vec::new());
        for part in target.intersect_interval(&unit).parts() {
            let (a_lo, a_hi) = sqrt_enclosure(part.lo(), bits).expect("nonnegative");
            let (b_lo, b_hi) = sqrt_enclosure(part.hi(), bits).expect("nonnegative");
            outer.extend(Interval::new(a_lo, b_hi).ok());
            inner.extend(Interval::new(a_hi, b_lo).ok());
        }
        let clip = |v: Vec<Interval<Rational>>| {
            RationalIntervalSet::normalize(v).intersect_interval(&unit).union(&fixed)
        };
        (clip(outer), clip(inner))
    }
}
