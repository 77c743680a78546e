use serde::{Deserialize, Serialize};

use crate::numerics::{int, rat, sqrt_enclosure, Interval, Rational, RationalIntervalSet};

use super::SystemError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadraticFamily {
    /// `x -> lambda * x * (1 - x)` on `[0, 1]`.
    Logistic,
    /// `x -> 1 - mu * x^2` on `[-1, 1]`.
    Unimodal,
}

/// Member of one of the two quadratic families, written internally as
/// `peak - width * (x - center)^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticFamilyMap {
    pub family: QuadraticFamily,
    pub parameter: Rational,
}

impl QuadraticFamilyMap {
    pub fn new(family: QuadraticFamily, parameter: Rational) -> Result<Self, SystemError> {
        let ok = match family {
            QuadraticFamily::Logistic => parameter > int(0) && parameter <= int(4),
            QuadraticFamily::Unimodal => parameter >= int(1) && parameter <= int(2),
        };
        if !ok {
            return Err(SystemError::Invalid(format!(
                "parameter {parameter} outside the admissible range for {family:?}"
            )));
        }
        Ok(Self { family, parameter })
    }

    pub fn logistic(lambda: Rational) -> Result<Self, SystemError> {
        Self::new(QuadraticFamily::Logistic, lambda)
    }

    pub fn unimodal(mu: Rational) -> Result<Self, SystemError> {
        Self::new(QuadraticFamily::Unimodal, mu)
    }

    pub fn domain(&self) -> Interval<Rational> {
        match self.family {
            QuadraticFamily::Logistic => Interval::new(int(0), int(1)),
            QuadraticFamily::Unimodal => Interval::new(int(-1), int(1)),
        }
        .expect("ordered")
    }

    pub fn critical_point(&self) -> Rational {
        match self.family {
            QuadraticFamily::Logistic => rat(1, 2),
            QuadraticFamily::Unimodal => int(0),
        }
    }

    fn peak(&self) -> Rational {
        match self.family {
            QuadraticFamily::Logistic => &self.parameter / int(4),
            QuadraticFamily::Unimodal => int(1),
        }
    }

    fn width(&self) -> Rational {
        self.parameter.clone()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let d = x - self.critical_point();
        self.peak() - self.width() * &d * &d
    }

    /// First three derivatives at `x`.
    pub fn derivatives(&self, x: &Rational) -> (Rational, Rational, Rational) {
        let d = x - self.critical_point();
        let w = self.width();
        (-(int(2) * &w * d), -(int(2) * w), int(0))
    }

    /// Preimage enclosures: `(outer, inner)` with `inner ⊆ exact ⊆ outer` and
    /// endpoint error at most `2^-bits`.
    pub fn preimage_bounds(
        &self,
        target: &RationalIntervalSet,
        bits: u32,
    ) -> (RationalIntervalSet, RationalIntervalSet) {
        let c = self.critical_point();
        let dom = self.domain();
        let (mut outer, mut inner) = (Vec::new(), Vec::new());
        for part in target.parts() {
            // (x - c)^2 in [u1, u2]
            let u1 = (self.peak() - part.hi()) / self.width();
            let u2 = (self.peak() - part.lo()) / self.width();
            if u2 < int(0) {
                continue;
            }
            let u1 = if u1 < int(0) { int(0) } else { u1 };
            let (r1_lo, r1_hi) = sqrt_enclosure(&u1, bits).expect("nonnegative");
            let (r2_lo, r2_hi) = sqrt_enclosure(&u2, bits).expect("nonnegative");
            let push = |list: &mut Vec<Interval<Rational>>, near: &Rational, far: &Rational| {
                if near > far {
                    return;
                }
                for (a, b) in [(&c - far, &c - near), (&c + near, &c + far)] {
                    if let Some(iv) = Interval::new(a, b).ok().and_then(|iv| iv.intersect(&dom)) {
                        list.push(iv);
                    }
                }
            };
            push(&mut outer, &r1_lo, &r2_hi);
            push(&mut inner, &r1_hi, &r2_lo);
        }
        (RationalIntervalSet::normalize(outer), RationalIntervalSet::normalize(inner))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_peak() {
        let g = QuadraticFamilyMap::logistic(int(4)).unwrap();
        assert_eq!(g.eval(&rat(1, 2)), int(1));
        assert_eq!(g.eval(&int(1)), int(0));
        assert_eq!(g.eval(&rat(1, 4)), rat(3, 4));
    }

    #[test]
    fn parameter_ranges() {
        assert!(QuadraticFamilyMap::logistic(int(5)).is_err());
        assert!(QuadraticFamilyMap::unimodal(rat(1, 2)).is_err());
        assert!(QuadraticFamilyMap::unimodal(int(2)).is_ok());
    }

    #[test]
    fn preimage_bounds_bracket_exact() {
        let g = QuadraticFamilyMap::logistic(int(4)).unwrap();
        // g(x) = 3/4 at x = 1/4 and 3/4
        let t = RationalIntervalSet::point(rat(3, 4));
        let (outer, inner) = g.preimage_bounds(&t, 32);
        assert_eq!(outer, RationalIntervalSet::points([rat(1, 4), rat(3, 4)]));
        assert_eq!(inner, outer);
        // g(x) = 1/2 has irrational preimages
        let t = RationalIntervalSet::from_pairs([(rat(1, 2), rat(1, 2))]).unwrap();
        let (outer, inner) = g.preimage_bounds(&t, 20);
        assert!(inner.is_empty());
        assert_eq!(outer.parts().len(), 2);
        for p in outer.parts() {
            assert!(g.eval(p.lo()) <= rat(1, 2) || g.eval(p.hi()) <= rat(1, 2));
            assert!(p.len() <= crate::numerics::pow2_neg(19));
        }
    }

    #[test]
    fn inner_maps_into_target() {
        let f = QuadraticFamilyMap::unimodal(rat(7, 4)).unwrap();
        let t = RationalIntervalSet::from_pairs([(rat(-1, 3), rat(1, 5))]).unwrap();
        let (outer, inner) = f.preimage_bounds(&t, 24);
        assert!(inner.is_subset_of(&outer));
        for p in inner.parts() {
            for x in [p.lo(), p.hi()] {
                assert!(t.contains(&f.eval(x)));
            }
        }
    }
}
