//! Points and displacement vectors in one or two dimensions.
//!
//! Both dimensions share the same fixed storage; the unused second coordinate
//! of a 1D point is always zero, so arithmetic never needs to branch on `dim`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    c: [f64; 2],
    dim: u8,
}

impl Point {
    pub fn new1(x: f64) -> Self {
        Point { c: [x, 0.0], dim: 1 }
    }

    pub fn new2(x: f64, y: f64) -> Self {
        Point { c: [x, y], dim: 2 }
    }

    pub fn zero(dim: usize) -> Self {
        debug_assert!(dim == 1 || dim == 2);
        Point { c: [0.0; 2], dim: dim as u8 }
    }

    /// Builds a point from a coordinate slice of length 1 or 2.
    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        let p = match coords {
            [x] => Point::new1(*x),
            [x, y] => Point::new2(*x, *y),
            _ => return Err(Error::InvalidPoint(format!("expected 1 or 2 coordinates, got {}", coords.len()))),
        };
        if !p.is_finite() {
            return Err(Error::InvalidPoint(format!("non-finite coordinates {coords:?}")));
        }
        Ok(p)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim as usize]
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.c[0]
    }

    /// Second coordinate; zero for 1D points.
    #[inline]
    pub fn y(&self) -> f64 {
        self.c[1]
    }

    #[inline]
    pub fn dot(&self, other: &Point) -> f64 {
        self.c[0] * other.c[0] + self.c[1] * other.c[1]
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.c[0] - other.c[0];
        let dy = self.c[1] - other.c[1];
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.c[0].is_finite() && self.c[1].is_finite()
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: dim, found: self.dim() })
        }
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Point> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(*self * (1.0 / n))
        } else {
            None
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords()).finish()
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point { c: [self.c[0] + rhs.c[0], self.c[1] + rhs.c[1]], dim: self.dim }
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point { c: [self.c[0] - rhs.c[0], self.c[1] - rhs.c[1]], dim: self.dim }
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point { c: [-self.c[0], -self.c[1]], dim: self.dim }
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        Point { c: [self.c[0] * s, self.c[1] * s], dim: self.dim }
    }
}

impl AddAssign for Point {
    #[inline]
    fn add_assign(&mut self, rhs: Point) {
        self.c[0] += rhs.c[0];
        self.c[1] += rhs.c[1];
    }
}

impl SubAssign for Point {
    #[inline]
    fn sub_assign(&mut self, rhs: Point) {
        self.c[0] -= rhs.c[0];
        self.c[1] -= rhs.c[1];
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Point::from_slice(&v).map_err(serde::de::Error::custom)
    }
}
