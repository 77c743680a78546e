use num_traits::{One, Signed, Zero};

use crate::numerics::{int, pow3_neg, Interval, Rational, RationalIntervalSet};

use super::pl::Branch;
use super::SystemError;

/// Level-`level` approximation of the middle-thirds Cantor set in `[0, 1]`:
/// the `2^level` closed intervals of length `3^-level` covering it.
pub fn middle_thirds(level: u32) -> RationalIntervalSet {
    let mut parts = vec![(int(0), int(1))];
    for _ in 0..level {
        parts = parts
            .into_iter()
            .flat_map(|(a, b)| {
                let third = (&b - &a) / int(3);
                let left = (a.clone(), &a + &third);
                let right = (&b - &third, b);
                [left, right]
            })
            .collect();
    }
    RationalIntervalSet::from_pairs(parts).expect("ordered")
}

/// Symmetric Cantor set `K ∪ -K` at the given level.
pub fn symmetric_cantor(level: u32) -> RationalIntervalSet {
    let k = middle_thirds(level);
    let neg = k.affine_image(&int(-1), &int(0)).expect("nonzero slope");
    k.union(&neg)
}

/// Expanding map of the symmetric Cantor set that fixes 0, truncated at a
/// finite approximation depth.
///
/// Piece `n > 0` lives on `[2/3^n, 1/3^(n-1)]`, piece `-n` on its mirror.
#[derive(Clone, Debug, PartialEq)]
pub struct CantorSystem {
    depth: u32,
    approx: RationalIntervalSet,
    shallower: RationalIntervalSet,
}

impl CantorSystem {
    pub fn new(depth: u32) -> Result<Self, SystemError> {
        if depth == 0 || depth > 16 {
            return Err(SystemError::Invalid("cantor depth must be in 1..=16".into()));
        }
        Ok(Self {
            depth,
            approx: symmetric_cantor(depth),
            shallower: symmetric_cantor(depth - 1),
        })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Level-`depth` approximation of the whole Cantor set.
    pub fn approximation(&self) -> &RationalIntervalSet {
        &self.approx
    }

    /// Hull of piece `n` (`n != 0`).
    pub fn piece_interval(n: i32) -> Interval<Rational> {
        let k = n.unsigned_abs();
        let lo = int(2) * pow3_neg(k);
        let hi = pow3_neg(k - 1);
        if n > 0 {
            Interval::new(lo, hi).expect("ordered")
        } else {
            Interval::new(-hi, -lo).expect("ordered")
        }
    }

    /// Affine formula `(slope, offset)` of piece `n`.
    pub fn piece_map(n: i32) -> (Rational, Rational) {
        let five_thirds = Rational::new(5.into(), 3.into());
        match n {
            1 => (int(3), int(-2)),
            -1 => (int(3), int(2)),
            2 => (int(3), int(0)),
            -2 => (int(3), five_thirds),
            3 => (int(9), int(0)),
            -3 => (int(9), five_thirds),
            n if n > 3 => (int(3), int(2) * pow3_neg(n as u32 - 2)),
            n => (int(3), pow3_neg(n.unsigned_abs() - 3)),
        }
    }

    /// Piece index of a band point, `None` at 0 or inside a gap between bands.
    pub fn piece_of(x: &Rational) -> Option<i32> {
        if x.is_zero() || x.abs() > int(1) {
            return None;
        }
        let a = x.abs();
        let mut n: u32 = 1;
        while pow3_neg(n) >= a {
            n += 1;
        }
        // now 1/3^n < a <= 1/3^(n-1)
        let band = Self::piece_interval(n as i32);
        if !band.contains(&a) {
            return None;
        }
        Some(if x.is_positive() { n as i32 } else { -(n as i32) })
    }

    /// The truncated space: 0 together with the pieces of index at most `depth`.
    pub fn space(&self) -> RationalIntervalSet {
        let bound = int(2) * pow3_neg(self.depth);
        let far = RationalIntervalSet::from_pairs([(int(-1), -bound.clone()), (bound, int(1))])
            .expect("ordered");
        self.approx.intersect(&far).union(&RationalIntervalSet::point(int(0)))
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational, SystemError> {
        if x.is_zero() {
            return Ok(int(0));
        }
        if !self.approx.contains(x) {
            return Err(SystemError::OutOfDomain(format!("{x} is not in the depth-{} approximation", self.depth)));
        }
        let n = Self::piece_of(x)
            .ok_or_else(|| SystemError::OutOfDomain(format!("{x} lies between pieces")))?;
        let (slope, offset) = Self::piece_map(n);
        Ok(slope * x + offset)
    }

    pub fn branches(&self, window: &RationalIntervalSet) -> Vec<Branch<Rational>> {
        let mut out = Vec::new();
        if window.contains(&int(0)) {
            out.push(Branch { interval: Interval::point(int(0)), slope: Rational::one(), offset: int(0) });
        }
        let depth = self.depth as i32;
        let mut pieces: Vec<i32> = (1..=depth).flat_map(|n| [n, -n]).collect();
        pieces.sort_by_key(|&n| Self::piece_interval(n).lo().clone());
        for n in pieces {
            let hit = window.intersect_interval(&Self::piece_interval(n));
            if let Some(hull) = hit.hull() {
                let (slope, offset) = Self::piece_map(n);
                out.push(Branch { interval: hull, slope, offset });
            }
        }
        out
    }

    pub fn preimage(&self, target: &RationalIntervalSet) -> RationalIntervalSet {
        let space = self.space();
        let parts = self
            .branches(&space)
            .into_iter()
            .flat_map(|b| b.preimage(target).expect("nonzero slopes").into_parts());
        RationalIntervalSet::normalize(parts).intersect(&space)
    }

    /// Image of a subset of the space, as a union over pieces.
    pub fn image(&self, set: &RationalIntervalSet) -> RationalIntervalSet {
        let set = set.intersect(&self.space());
        let parts = self.branches(&set).into_iter().flat_map(|b| {
            set.intersect_interval(&b.interval)
                .affine_image(&b.slope, &b.offset)
                .expect("nonzero slopes")
                .into_parts()
        });
        RationalIntervalSet::normalize(parts)
    }

    /// Level-`depth - 1` approximation, which contains the image of the space.
    pub fn codomain(&self) -> &RationalIntervalSet {
        &self.shallower
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;

    #[test]
    fn piece_endpoints_match_image_table() {
        // positive slope pieces map hull endpoints onto image hull endpoints
        let image_hull = |n: i32| -> Interval<Rational> {
            match n {
                1 => Interval::new(int(0), int(1)).unwrap(),
                -1 => Interval::new(int(-1), int(0)).unwrap(),
                2 | -2 | 3 | -3 => CantorSystem::piece_interval(1),
                n if n > 3 => {
                    let h = CantorSystem::piece_interval(n - 2);
                    let third = h.len() / int(3);
                    Interval::new(h.hi() - third, h.hi().clone()).unwrap()
                }
                n => {
                    let h = CantorSystem::piece_interval(-n - 2);
                    let third = h.len() / int(3);
                    Interval::new(h.lo().clone(), h.lo() + third).unwrap()
                }
            }
        };
        for n in (1..=9).flat_map(|n| [n, -n]) {
            let (s, o) = CantorSystem::piece_map(n);
            let img = CantorSystem::piece_interval(n).affine_image(&s, &o).unwrap();
            assert_eq!(img, image_hull(n), "piece {n}");
        }
    }

    #[test]
    fn eval_examples() {
        let c = CantorSystem::new(6).unwrap();
        assert_eq!(c.eval(&rat(2, 27)).unwrap(), rat(2, 3));
        assert_eq!(c.eval(&int(0)).unwrap(), int(0));
        assert!(c.eval(&rat(1, 2)).is_err());
    }

    #[test]
    fn branch_on_second_piece() {
        let c = CantorSystem::new(5).unwrap();
        let w = RationalIntervalSet::from_pairs([(rat(2, 9), rat(1, 3))]).unwrap();
        let b = c.branches(&w);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].interval, Interval::new(rat(2, 9), rat(1, 3)).unwrap());
        assert_eq!((b[0].slope.clone(), b[0].offset.clone()), (int(3), int(0)));
    }

    #[test]
    fn preimage_of_first_piece() {
        let c = CantorSystem::new(5).unwrap();
        let target = RationalIntervalSet::single(CantorSystem::piece_interval(1));
        let got = c.preimage(&target);
        // pieces ±2, ±3 map onto piece 1; piece 1 contributes its top third
        let mut expect = RationalIntervalSet::from_pairs([(rat(8, 9), int(1))]).unwrap();
        for n in [2, -2, 3, -3] {
            expect = expect.union(&RationalIntervalSet::single(CantorSystem::piece_interval(n)));
        }
        assert_eq!(got, expect.intersect(&c.space()));
    }

    #[test]
    fn space_maps_into_shallower_approximation() {
        for depth in 3..=7 {
            let c = CantorSystem::new(depth).unwrap();
            let space = c.space();
            let steep = RationalIntervalSet::single(CantorSystem::piece_interval(3))
                .union(&RationalIntervalSet::single(CantorSystem::piece_interval(-3)));
            let gentle: Vec<_> = space
                .parts()
                .iter()
                .filter(|p| steep.intersect_interval(p).is_empty())
                .cloned()
                .collect();
            let gentle = RationalIntervalSet::normalize(gentle);
            assert!(c.image(&gentle).is_subset_of(c.codomain()), "depth {depth}");
            // slope-9 pieces drop two levels
            let img = c.image(&space.intersect(&steep));
            assert!(img.is_subset_of(&symmetric_cantor(depth - 2)));
            assert!(!img.is_subset_of(c.codomain()));
        }
    }

    #[test]
    fn piece_lookup() {
        assert_eq!(CantorSystem::piece_of(&rat(1, 3)), Some(2));
        assert_eq!(CantorSystem::piece_of(&rat(-2, 27)), Some(-3));
        assert_eq!(CantorSystem::piece_of(&rat(1, 2)), None);
        assert_eq!(CantorSystem::piece_of(&rat(2, 243)), Some(5));
    }
}
