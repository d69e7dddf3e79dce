//! Fixed-capacity points for simulations in dimensions 1 to 3.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest dimension supported by the simulation engines. The analytic
/// classifier in [`crate::radius`] works for any dimension.
pub const MAX_DIM: usize = 3;

/// A point of R^d stored in a fixed array; coordinates beyond `d` are zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point(pub [f64; MAX_DIM]);

impl Point {
    pub const ORIGIN: Point = Point([0.0; MAX_DIM]);

    /// Builds a point from the first `coords.len()` coordinates.
    ///
    /// Panics if more than [`MAX_DIM`] coordinates are given.
    pub fn new(coords: &[f64]) -> Self {
        assert!(coords.len() <= MAX_DIM, "at most {MAX_DIM} coordinates supported");
        let mut p = [0.0; MAX_DIM];
        p[..coords.len()].copy_from_slice(coords);
        Point(p)
    }

    pub fn on_axis(x: f64) -> Self {
        Point([x, 0.0, 0.0])
    }

    pub fn coords(&self, dim: usize) -> &[f64] {
        &self.0[..dim]
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        let a = self.0[0] - other.0[0];
        let b = self.0[1] - other.0[1];
        let c = self.0[2] - other.0[2];
        a * a + b * b + c * c
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.dist(&Point::ORIGIN)
    }

    pub fn scaled(&self, factor: f64) -> Point {
        Point([self.0[0] * factor, self.0[1] * factor, self.0[2] * factor])
    }

    pub fn add(&self, other: &Point) -> Point {
        Point([self.0[0] + other.0[0], self.0[1] + other.0[1], self.0[2] + other.0[2]])
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point([self.0[0] - other.0[0], self.0[1] - other.0[1], self.0[2] - other.0[2]])
    }

    /// Lexicographic total order on coordinates.
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    }

    /// Bit pattern key, used for exact coordinate lookups.
    pub fn bits(&self) -> [u64; MAX_DIM] {
        [self.0[0].to_bits(), self.0[1].to_bits(), self.0[2].to_bits()]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}
