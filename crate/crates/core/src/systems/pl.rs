use crate::numerics::{Interval, IntervalSet, NumericsError, Scalar};

use super::SystemError;

/// One maximal affine piece `x -> slope * x + offset` on `interval`.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch<S> {
    pub interval: Interval<S>,
    pub slope: S,
    pub offset: S,
}

impl<S: Scalar> Branch<S> {
    pub fn apply(&self, x: &S) -> S {
        self.slope.clone() * x.clone() + self.offset.clone()
    }

    /// `{x in interval : slope * x + offset in target}`.
    pub fn preimage(&self, target: &IntervalSet<S>) -> Result<IntervalSet<S>, NumericsError> {
        let inv_slope = S::one() / self.slope.clone();
        let inv_offset = -(self.offset.clone() / self.slope.clone());
        Ok(target.affine_image(&inv_slope, &inv_offset)?.intersect_interval(&self.interval))
    }
}

/// Continuous map of `[0, 1]` into itself, affine between consecutive breakpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinearMap<S> {
    breakpoints: Vec<S>,
    values: Vec<S>,
    pieces: Vec<Branch<S>>,
}

impl<S: Scalar> PiecewiseLinearMap<S> {
    pub fn new(breakpoints: Vec<S>, values: Vec<S>) -> Result<Self, SystemError> {
        let invalid = |m: &str| Err(SystemError::Invalid(m.to_string()));
        if breakpoints.len() < 2 || breakpoints.len() != values.len() {
            return invalid("need at least two breakpoints and one value per breakpoint");
        }
        if breakpoints[0] != S::zero() || breakpoints[breakpoints.len() - 1] != S::one() {
            return invalid("breakpoints must start at 0 and end at 1");
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("breakpoints must be strictly increasing");
        }
        if values.iter().any(|v| *v < S::zero() || *v > S::one()) {
            return invalid("values must lie in [0, 1]");
        }
        if values.windows(2).any(|w| w[0] == w[1]) {
            return invalid("flat pieces are not supported");
        }
        let pieces = (0..breakpoints.len() - 1)
            .map(|i| {
                let (x0, x1) = (&breakpoints[i], &breakpoints[i + 1]);
                let (y0, y1) = (&values[i], &values[i + 1]);
                let slope = (y1.clone() - y0.clone()) / (x1.clone() - x0.clone());
                let offset = y0.clone() - slope.clone() * x0.clone();
                Branch { interval: Interval::new(x0.clone(), x1.clone()).expect("sorted"), slope, offset }
            })
            .collect();
        Ok(Self { breakpoints, values, pieces })
    }

    /// Tent map `x -> lambda * min(x, 1 - x)`.
    pub fn tent(lambda: S) -> Result<Self, SystemError> {
        let half = S::one() / (S::one() + S::one());
        Self::new(
            vec![S::zero(), half.clone(), S::one()],
            vec![S::zero(), lambda * half, S::zero()],
        )
    }

    pub fn breakpoints(&self) -> &[S] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn slopes(&self) -> Vec<S> {
        self.pieces().map(|b| b.slope).collect()
    }

    pub fn pieces(&self) -> impl Iterator<Item = Branch<S>> + '_ {
        self.pieces.iter().cloned()
    }

    pub fn piece_index(&self, x: &S) -> Option<usize> {
        if *x < S::zero() || *x > S::one() {
            return None;
        }
        let idx = self.breakpoints.partition_point(|b| b <= x);
        Some(idx.saturating_sub(1).min(self.breakpoints.len() - 2))
    }

    pub fn eval(&self, x: &S) -> Option<S> {
        let i = self.piece_index(x)?;
        self.pieces.get(i).map(|b| b.apply(x))
    }

    /// Pieces meeting the window, clipped to its hull.
    pub fn branches(&self, window: &IntervalSet<S>) -> Vec<Branch<S>> {
        self.pieces()
            .filter_map(|b| {
                let hit = window.intersect_interval(&b.interval);
                let hull = hit.hull()?;
                Some(Branch { interval: hull, ..b })
            })
            .collect()
    }

    pub fn preimage(&self, target: &IntervalSet<S>) -> IntervalSet<S> {
        let parts = self
            .pieces()
            .flat_map(|b| b.preimage(target).expect("slopes are nonzero").into_parts());
        IntervalSet::normalize(parts)
    }

    /// `preimage(target) ∩ window`, skipping target parts no piece over the window reaches.
    pub fn preimage_within(&self, target: &IntervalSet<S>, window: &Interval<S>) -> IntervalSet<S> {
        let parts = self.pieces.iter().filter_map(|b| {
            let domain = b.interval.intersect(window)?;
            let (u, v) = (b.apply(domain.lo()), b.apply(domain.hi()));
            let reach = if u <= v { Interval::new(u, v) } else { Interval::new(v, u) }.expect("ordered");
            let hit = target.intersect_interval(&reach);
            if hit.is_empty() {
                return None;
            }
            let clipped = Branch { interval: domain, slope: b.slope.clone(), offset: b.offset.clone() };
            Some(clipped.preimage(&hit).expect("slopes are nonzero").into_parts())
        });
        IntervalSet::normalize(parts.flatten())
    }

    /// Interior breakpoints where the slope changes sign.
    pub fn critical_points(&self) -> Vec<S> {
        let slopes = self.slopes();
        (1..self.breakpoints.len() - 1)
            .filter(|&i| slopes[i - 1].is_positive() != slopes[i].is_positive())
            .map(|i| self.breakpoints[i].clone())
            .collect()
    }

    pub fn lipschitz(&self) -> S {
        self.slopes()
            .into_iter()
            .map(|s| s.abs())
            .fold(S::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn min_abs_slope(&self) -> S {
        let mut it = self.slopes().into_iter().map(|s| s.abs());
        let first = it.next().expect("at least one piece");
        it.fold(first, |a, b| if b < a { b } else { a })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut xs: Vec<S> = Vec::new();
        for piece in inner.pieces() {
            xs.push(piece.interval.lo().clone());
            for b in &self.breakpoints {
                let x = (b.clone() - piece.offset.clone()) / piece.slope.clone();
                if piece.interval.lo() < &x && &x < piece.interval.hi() {
                    xs.push(x);
                }
            }
        }
        xs.push(S::one());
        xs.sort_by(|a, b| a.partial_cmp(b).expect("ordered scalars"));
        xs.dedup();
        let ys = xs
            .iter()
            .map(|x| self.eval(&inner.eval(x).expect("in domain")).expect("in domain"))
            .collect();
        Self::new(xs, ys).expect("composition of non-flat maps is non-flat")
    }

    /// `n`-fold composite.
    pub fn power(&self, n: usize) -> Self {
        let mut out = self.clone();
        for _ in 1..n.max(1) {
            out = self.compose(&out);
        }
        out
    }

    /// Image of a closed interval (a single closed interval by continuity).
    pub fn image_interval(&self, iv: &Interval<S>) -> Interval<S> {
        let mut lo = self.eval(iv.lo()).expect("in domain");
        let mut hi = lo.clone();
        let mut consider = |y: S| {
            if y < lo {
                lo = y.clone();
            }
            if y > hi {
                hi = y;
            }
        };
        consider(self.eval(iv.hi()).expect("in domain"));
        for (b, v) in self.breakpoints.iter().zip(&self.values) {
            if iv.contains(b) {
                consider(v.clone());
            }
        }
        Interval::new(lo, hi).expect("ordered")
    }
}
