use super::polyline::Polyline;
use crate::error::{Error, Result};
use crate::point::Point;

/// Default reach declared for the bean curve.
///
/// The narrowest point is the waist at `x = 0`, where the two branches sit at
/// `y = +-0.04`; the midpoint between them has two closest points at distance
/// 0.04, so no larger tube radius can be valid.
pub const BEAN_BOUNDARY_REACH: f64 = 0.04;

/// Default reach declared for the solid bean, whose exterior has no waist.
pub const BEAN_INTERIOR_REACH: f64 = 0.05;

/// Half-height of the bean at abscissa `x` in `[-1, 1]`.
pub fn bean_profile(x: f64) -> f64 {
    0.4 * (1.0 - x * x).max(0.0).sqrt() * (1.1 - (3.0 * x).cos())
}

/// Closed polyline with `n` vertices on the bean boundary.
///
/// Abscissae are uniform in `[-1, 1]`; the upper branch runs left to right,
/// the lower branch returns right to left, and the tips `(+-1, 0)` appear
/// once each.
pub fn sample_bean_boundary(n: usize, declared_reach: f64) -> Result<Polyline> {
    if n < 8 || !n.is_multiple_of(2) {
        return Err(Error::InvalidResolution(n));
    }
    let per_branch = (n + 2) / 2;
    let xs: Vec<f64> = (0..per_branch).map(|i| -1.0 + 2.0 * i as f64 / (per_branch - 1) as f64).collect();
    let mut vertices = Vec::with_capacity(n);
    vertices.extend(xs.iter().map(|&x| Point::new2(x, bean_profile(x))));
    vertices.extend(xs[1..per_branch - 1].iter().rev().map(|&x| Point::new2(x, -bean_profile(x))));
    debug_assert_eq!(vertices.len(), n);
    Polyline::new(vertices, true, declared_reach)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_bean_vertices() {
        let b = sample_bean_boundary(8, 0.05).unwrap();
        let v = b.vertices();
        assert_eq!(v.len(), 8);
        assert_eq!(v[0], Point::new2(-1.0, 0.0));
        assert_eq!(v[4], Point::new2(1.0, 0.0));
        // Upper branch at x = 0: 0.4 * 1 * (1.1 - 1).
        assert_eq!(v[2].x(), 0.0);
        assert!((v[2].y() - 0.04).abs() < 1e-15);
        // Lower branch mirrors it.
        assert_eq!(v[6].x(), 0.0);
        assert!((v[6].y() + 0.04).abs() < 1e-15);
        assert_eq!(v.iter().filter(|p| p.x().abs() == 1.0).count(), 2);
        assert_eq!(b.declared_reach(), 0.05);
    }

    #[test]
    fn resolution_checks() {
        assert_eq!(sample_bean_boundary(6, 0.04).unwrap_err(), Error::InvalidResolution(6));
        assert_eq!(sample_bean_boundary(9, 0.04).unwrap_err(), Error::InvalidResolution(9));
        assert!(sample_bean_boundary(10, 0.04).is_ok());
    }

    #[test]
    fn orientation_is_clockwise() {
        // Upper branch first, left to right, traces the curve clockwise.
        let b = sample_bean_boundary(256, 0.04).unwrap();
        assert!(b.signed_area2() < 0.0);
        assert!(b.encloses(Point::new2(0.5, 0.0)));
        assert!(!b.encloses(Point::new2(0.0, 0.1)));
    }
}
