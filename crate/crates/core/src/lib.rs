//! Exact shadowing and expansivity analysis for interval maps and symbolic systems.

pub mod cli;
pub mod expansivity;
pub mod kneading;
pub mod numerics;
pub mod pseudo_orbits;
pub mod shadowing;
pub mod systems;

pub use numerics::{FloatIntervalSet, Interval, IntervalSet, Rational, RationalIntervalSet, Scalar};
pub use systems::{Point, SystemSpec};
