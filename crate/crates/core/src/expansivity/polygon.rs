//! Feasibility of a finite system of affine inequalities in two variables,
//! some of them strict, over a closed box.
//!
//! The closed relaxation is clipped to a convex polygon. If the strict
//! system has any solution, every point of the polygon's relative interior
//! solves it, so testing the vertices and the vertex average decides it.

use std::ops::{Add, Mul, Neg, Sub};

use crate::numerics::{int, Interval, Rational};

pub(crate) type Vertex = (Rational, Rational);

/// Affine form `a u + b v + c`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Form {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl Form {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Self {
        Self { a, b, c }
    }

    pub fn u() -> Self {
        Self::new(int(1), int(0), int(0))
    }

    pub fn v() -> Self {
        Self::new(int(0), int(1), int(0))
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(int(0), int(0), c)
    }

    pub fn at(&self, p: &Vertex) -> Rational {
        &self.a * &p.0 + &self.b * &p.1 + &self.c
    }

    /// `self > 0`.
    pub fn positive(self) -> Constraint {
        Constraint { form: self, strict: true }
    }

    /// `self >= 0`.
    pub fn nonnegative(self) -> Constraint {
        Constraint { form: self, strict: false }
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, o: Form) -> Form {
        Form::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, o: Form) -> Form {
        Form::new(self.a - o.a, self.b - o.b, self.c - o.c)
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        Form::new(-self.a, -self.b, -self.c)
    }
}

impl Mul<&Rational> for Form {
    type Output = Form;
    fn mul(self, k: &Rational) -> Form {
        Form::new(self.a * k, self.b * k, self.c * k)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Constraint {
    form: Form,
    strict: bool,
}

impl Constraint {
    fn holds(&self, p: &Vertex) -> bool {
        let v = self.form.at(p);
        if self.strict {
            v > int(0)
        } else {
            v >= int(0)
        }
    }
}

fn clip(poly: Vec<Vertex>, form: &Form) -> Vec<Vertex> {
    let n = poly.len();
    let mut out: Vec<Vertex> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let cur = &poly[i];
        let prev = &poly[(i + n - 1) % n];
        let (vc, vp) = (form.at(cur), form.at(prev));
        let (cin, pin) = (vc >= int(0), vp >= int(0));
        if cin != pin {
            let t = &vp / (&vp - &vc);
            out.push((&prev.0 + &t * (&cur.0 - &prev.0), &prev.1 + &t * (&cur.1 - &prev.1)));
        }
        if cin {
            out.push(cur.clone());
        }
    }
    out.dedup();
    out
}

/// A point of `us × vs` satisfying every constraint, if there is one.
pub(crate) fn feasible_point(
    us: &Interval<Rational>,
    vs: &Interval<Rational>,
    constraints: &[Constraint],
) -> Option<Vertex> {
    let mut poly = vec![
        (us.lo().clone(), vs.lo().clone()),
        (us.hi().clone(), vs.lo().clone()),
        (us.hi().clone(), vs.hi().clone()),
        (us.lo().clone(), vs.hi().clone()),
    ];
    poly.dedup();
    for c in constraints {
        poly = clip(poly, &c.form);
        if poly.is_empty() {
            return None;
        }
    }
    let ok = |p: &Vertex| constraints.iter().all(|c| c.holds(p));
    if let Some(v) = poly.iter().find(|v| ok(v)) {
        return Some(v.clone());
    }
    let n = int(poly.len() as i64);
    let mean = poly.iter().fold((int(0), int(0)), |acc, p| (acc.0 + &p.0, acc.1 + &p.1));
    let mean = (mean.0 / &n, mean.1 / &n);
    ok(&mean).then_some(mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;

    fn unit() -> Interval<Rational> {
        Interval::new(int(0), int(1)).unwrap()
    }

    #[test]
    fn strict_triangle_is_found_in_its_interior() {
        // u > 0, v > 0, u + v < 1/2
        let cons = vec![
            Form::u().positive(),
            Form::v().positive(),
            (Form::constant(rat(1, 2)) - Form::u() - Form::v()).positive(),
        ];
        let p = feasible_point(&unit(), &unit(), &cons).unwrap();
        assert!(p.0 > int(0) && p.1 > int(0) && &p.0 + &p.1 < rat(1, 2));
    }

    #[test]
    fn a_line_with_strict_sides_is_empty() {
        // u >= v and u < v
        let cons = vec![(Form::u() - Form::v()).nonnegative(), (Form::v() - Form::u()).positive()];
        assert!(feasible_point(&unit(), &unit(), &cons).is_none());
        // closed versions meet on the diagonal
        let cons = vec![(Form::u() - Form::v()).nonnegative(), (Form::v() - Form::u()).nonnegative()];
        let p = feasible_point(&unit(), &unit(), &cons).unwrap();
        assert_eq!(p.0, p.1);
    }

    #[test]
    fn degenerate_boxes() {
        let pt = Interval::point(rat(1, 3));
        let cons = vec![(Form::v() - Form::u()).positive()];
        let p = feasible_point(&pt, &unit(), &cons).unwrap();
        assert_eq!(p.0, rat(1, 3));
        assert!(p.1 > rat(1, 3));
        assert!(feasible_point(&pt, &pt, &cons).is_none());
    }

    #[test]
    fn agrees_with_grid_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let cons: Vec<Constraint> = (0..3)
                .map(|_| {
                    let f = Form::new(
                        rat(rng.gen_range(-4..=4), 1),
                        rat(rng.gen_range(-4..=4), 1),
                        rat(rng.gen_range(-4..=4), 4),
                    );
                    if rng.gen_bool(0.5) {
                        f.positive()
                    } else {
                        f.nonnegative()
                    }
                })
                .collect();
            let found = feasible_point(&unit(), &unit(), &cons);
            if let Some(p) = &found {
                assert!(cons.iter().all(|c| c.holds(p)));
            }
            let grid_hit = (0..=32).any(|i| {
                (0..=32).any(|j| cons.iter().all(|c| c.holds(&(rat(i, 32), rat(j, 32)))))
            });
            if grid_hit {
                assert!(found.is_some());
            }
        }
    }
}
