//! Positive-reach domains: distance, closest-point projection, reach and
//! proximal normals.

mod bean;
mod polyline;

pub use bean::{bean_profile, sample_bean_boundary, BEAN_BOUNDARY_REACH, BEAN_INTERIOR_REACH};
pub use polyline::{sample_circle, Polyline, SegmentHit};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// Absolute tolerance for "lies on the domain" checks.
pub const ON_DOMAIN_TOL: f64 = 1e-9;

/// Relative slack for analytic boundaries so that projections are idempotent.
const ANALYTIC_SLACK: f64 = 4.0 * f64::EPSILON;

/// A union of pairwise disjoint closed intervals, sorted left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidDomain("interval union needs at least one interval".into()));
        }
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(Error::InvalidDomain(format!("bad interval [{a}, {b}]")));
            }
        }
        for w in intervals.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(Error::InvalidDomain("intervals must be sorted and pairwise disjoint".into()));
            }
        }
        Ok(IntervalUnion { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    fn reach(&self) -> f64 {
        self.intervals.windows(2).map(|w| 0.5 * (w[1].0 - w[0].1)).fold(f64::INFINITY, f64::min)
    }

    /// Nearest point and its distance; errors on an exact tie between components.
    fn nearest(&self, x: f64) -> Result<(f64, f64)> {
        let mut best = (f64::NAN, f64::INFINITY);
        let mut tie = false;
        for &(a, b) in &self.intervals {
            let p = x.clamp(a, b);
            let d = (x - p).abs();
            if d < best.1 {
                best = (p, d);
                tie = false;
            } else if d == best.1 && p != best.0 {
                tie = true;
            }
        }
        if tie {
            Err(Error::AmbiguousProjection { distance: best.1 })
        } else {
            Ok(best)
        }
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Intervals(IntervalUnion),
    Disc { center: Point, radius: f64 },
    Circle { center: Point, radius: f64 },
    Curve(Polyline),
    Region(Polyline),
}

/// A compact subset of the plane or the line with positive reach.
#[derive(Debug, Clone)]
pub struct Domain {
    shape: Shape,
    reach: f64,
    diameter: f64,
}

impl Domain {
    pub fn interval_union(intervals: Vec<(f64, f64)>) -> Result<Self> {
        let iu = IntervalUnion::new(intervals)?;
        let reach = iu.reach();
        let diameter = iu.intervals.last().unwrap().1 - iu.intervals[0].0;
        Ok(Domain { shape: Shape::Intervals(iu), reach, diameter })
    }

    /// Closed disc (full two-dimensional body). Convex, so its reach is infinite.
    pub fn disc(center: Point, radius: f64) -> Result<Self> {
        center.check_dim(2)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDomain(format!("disc radius must be positive, got {radius}")));
        }
        Ok(Domain { shape: Shape::Disc { center, radius }, reach: f64::INFINITY, diameter: 2.0 * radius })
    }

    /// Circle as a one-dimensional curve; its reach equals the radius.
    pub fn circle(center: Point, radius: f64) -> Result<Self> {
        center.check_dim(2)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDomain(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Domain { shape: Shape::Circle { center, radius }, reach: radius, diameter: 2.0 * radius })
    }

    pub fn polyline(line: Polyline) -> Self {
        let reach = line.declared_reach();
        let diameter = line.diameter();
        Domain { shape: Shape::Curve(line), reach, diameter }
    }

    /// Region enclosed by a closed polyline; the polyline's declared reach is used.
    pub fn region(boundary: Polyline) -> Result<Self> {
        if !boundary.is_closed() || boundary.vertices().len() < 3 {
            return Err(Error::InvalidDomain(
                "region boundary must be a closed polyline with at least 3 vertices".into(),
            ));
        }
        let reach = boundary.declared_reach();
        let diameter = boundary.diameter();
        Ok(Domain { shape: Shape::Region(boundary), reach, diameter })
    }

    pub fn dim(&self) -> usize {
        match self.shape {
            Shape::Intervals(_) => 1,
            _ => 2,
        }
    }

    /// Reach of the set; `f64::INFINITY` for convex sets and single intervals.
    pub fn reach(&self) -> f64 {
        self.reach
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Boundary polyline of curve and region kinds.
    pub fn polyline_ref(&self) -> Option<&Polyline> {
        match &self.shape {
            Shape::Curve(p) | Shape::Region(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_region(&self) -> bool {
        matches!(self.shape, Shape::Region(_))
    }

    /// Euclidean distance from `x` to the set.
    pub fn distance(&self, x: &Point) -> Result<f64> {
        x.check_dim(self.dim())?;
        Ok(match &self.shape {
            Shape::Intervals(iu) => {
                iu.intervals.iter().map(|&(a, b)| (x.x() - x.x().clamp(a, b)).abs()).fold(f64::INFINITY, f64::min)
            }
            Shape::Disc { center, radius } => {
                let rho = x.dist(center);
                if rho <= radius * (1.0 + ANALYTIC_SLACK) {
                    0.0
                } else {
                    rho - radius
                }
            }
            Shape::Circle { center, radius } => {
                let gap = (x.dist(center) - radius).abs();
                if gap <= radius * ANALYTIC_SLACK {
                    0.0
                } else {
                    gap
                }
            }
            Shape::Curve(line) => line.closest(*x).dist_sq.sqrt(),
            Shape::Region(line) => {
                if line.encloses(*x) {
                    0.0
                } else {
                    line.closest(*x).dist_sq.sqrt()
                }
            }
        })
    }

    /// Closest point of the set, without the reach-tube restriction.
    ///
    /// Polyline ties go to the lowest segment index; for analytic kinds an exact
    /// tie (midpoint of a gap, centre of a circle) is reported as
    /// [`Error::AmbiguousProjection`].
    pub fn closest_point(&self, x: &Point) -> Result<Point> {
        x.check_dim(self.dim())?;
        match &self.shape {
            Shape::Intervals(iu) => iu.nearest(x.x()).map(|(p, _)| Point::new1(p)),
            Shape::Disc { center, radius } => {
                let u = *x - *center;
                let rho = u.norm();
                if rho <= radius * (1.0 + ANALYTIC_SLACK) {
                    Ok(*x)
                } else {
                    Ok(*center + u * (radius / rho))
                }
            }
            Shape::Circle { center, radius } => {
                let u = *x - *center;
                let rho = u.norm();
                if (rho - radius).abs() <= radius * ANALYTIC_SLACK {
                    Ok(*x)
                } else if rho == 0.0 {
                    Err(Error::AmbiguousProjection { distance: *radius })
                } else {
                    Ok(*center + u * (radius / rho))
                }
            }
            Shape::Curve(line) => Ok(line.closest(*x).point),
            Shape::Region(line) => {
                if line.encloses(*x) {
                    Ok(*x)
                } else {
                    Ok(line.closest(*x).point)
                }
            }
        }
    }

    /// Unique closest point for `x` strictly inside the reach tube.
    pub fn project(&self, x: &Point) -> Result<Point> {
        let distance = self.distance(x)?;
        if distance >= self.reach {
            return Err(Error::OutsideReachTube { distance, reach: self.reach });
        }
        self.closest_point(x)
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        Ok(self.distance(x)? <= ON_DOMAIN_TOL)
    }

    /// A finite sample of unit proximal normals at a point `p` of the set.
    pub fn proximal_normals(&self, p: &Point) -> Result<Vec<Point>> {
        let distance = self.distance(p)?;
        if distance > ON_DOMAIN_TOL {
            return Err(Error::NotOnDomain { distance });
        }
        Ok(match &self.shape {
            Shape::Intervals(iu) => {
                let x = p.x();
                let mut out = Vec::new();
                for &(a, b) in &iu.intervals {
                    if (x - a).abs() <= ON_DOMAIN_TOL {
                        out.push(Point::new1(-1.0));
                    }
                    if (x - b).abs() <= ON_DOMAIN_TOL {
                        out.push(Point::new1(1.0));
                    }
                }
                out
            }
            Shape::Disc { center, radius } => {
                let u = *p - *center;
                if (u.norm() - radius).abs() <= ON_DOMAIN_TOL {
                    vec![u.normalized().unwrap()]
                } else {
                    Vec::new()
                }
            }
            Shape::Circle { center, .. } => {
                let u = (*p - *center).normalized().unwrap();
                vec![u, -u]
            }
            Shape::Curve(line) => line.curve_normals(&line.closest(*p), ON_DOMAIN_TOL),
            Shape::Region(line) => {
                let hit = line.closest(*p);
                if hit.dist_sq.sqrt() > ON_DOMAIN_TOL {
                    // Interior point.
                    return Ok(Vec::new());
                }
                let ccw = line.signed_area2() > 0.0;
                let cands = line.curve_normals(&hit, ON_DOMAIN_TOL);
                if cands.len() == 2 && cands[0] == -cands[1] {
                    cands.into_iter().filter(|v| faces_exterior(line, &hit, *v, ccw)).collect()
                } else if faces_exterior(line, &hit, cands[cands.len() / 2], ccw) {
                    // Convex corner: the reflex cone is on the outside.
                    cands
                } else {
                    Vec::new()
                }
            }
        })
    }
}

/// Whether `dir` points to the exterior side of the hit segment.
fn faces_exterior(line: &Polyline, hit: &SegmentHit, dir: Point, ccw: bool) -> bool {
    let (a, b) = line.segment(hit.segment);
    let d = b - a;
    // Counter-clockwise boundaries have the exterior on the right.
    let right = Point::new2(d.y(), -d.x());
    let out = if ccw { right } else { -right };
    dir.dot(&out) > 0.0
}

/// Tagged JSON description of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    IntervalUnion {
        intervals: Vec<[f64; 2]>,
    },
    Disc {
        center: Point,
        radius: f64,
    },
    Circle {
        center: Point,
        radius: f64,
    },
    Polyline {
        vertices: Vec<Point>,
        closed: bool,
        reach: f64,
    },
    Region {
        vertices: Vec<Point>,
        reach: f64,
    },
    BeanBoundary {
        n: usize,
        #[serde(default = "default_bean_boundary_reach")]
        reach: f64,
    },
    BeanInterior {
        n: usize,
        #[serde(default = "default_bean_interior_reach")]
        reach: f64,
    },
}

fn default_bean_boundary_reach() -> f64 {
    BEAN_BOUNDARY_REACH
}

fn default_bean_interior_reach() -> f64 {
    BEAN_INTERIOR_REACH
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        match self {
            DomainSpec::IntervalUnion { intervals } => {
                Domain::interval_union(intervals.iter().map(|&[a, b]| (a, b)).collect())
            }
            DomainSpec::Disc { center, radius } => Domain::disc(*center, *radius),
            DomainSpec::Circle { center, radius } => Domain::circle(*center, *radius),
            DomainSpec::Polyline { vertices, closed, reach } => {
                Ok(Domain::polyline(Polyline::new(vertices.clone(), *closed, *reach)?))
            }
            DomainSpec::Region { vertices, reach } => Domain::region(Polyline::new(vertices.clone(), true, *reach)?),
            DomainSpec::BeanBoundary { n, reach } => Ok(Domain::polyline(sample_bean_boundary(*n, *reach)?)),
            DomainSpec::BeanInterior { n, reach } => Domain::region(sample_bean_boundary(*n, *reach)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gap_domain() -> Domain {
        Domain::interval_union(vec![(-1.0, 1.0), (1.5, 1.5)]).unwrap()
    }

    fn unit_disc() -> Domain {
        Domain::disc(Point::new2(0.0, 0.0), 1.0).unwrap()
    }

    fn unit_circle() -> Domain {
        Domain::circle(Point::new2(0.0, 0.0), 1.0).unwrap()
    }

    #[test]
    fn interval_union_distance_projection_reach() {
        let m = gap_domain();
        assert!((m.distance(&Point::new1(1.2)).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(m.project(&Point::new1(1.3)).unwrap(), Point::new1(1.5));
        assert!(matches!(m.project(&Point::new1(1.25)), Err(Error::OutsideReachTube { .. })));
        assert_eq!(m.reach(), 0.25);
        assert_eq!(m.diameter(), 2.5);
        assert!(matches!(m.closest_point(&Point::new1(1.25)), Err(Error::AmbiguousProjection { .. })));
        // Outside the tube the closest point is still well defined.
        assert_eq!(m.closest_point(&Point::new1(-1.75)).unwrap(), Point::new1(-1.0));
    }

    #[test]
    fn interval_union_validation() {
        assert!(Domain::interval_union(vec![]).is_err());
        assert!(Domain::interval_union(vec![(1.0, 0.0)]).is_err());
        assert!(Domain::interval_union(vec![(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(Domain::interval_union(vec![(2.0, 3.0), (0.0, 1.0)]).is_err());
        assert_eq!(Domain::interval_union(vec![(0.0, 1.0)]).unwrap().reach(), f64::INFINITY);
    }

    #[test]
    fn disc_queries() {
        let m = unit_disc();
        assert_eq!(m.distance(&Point::new2(2.0, 0.0)).unwrap(), 1.0);
        assert_eq!(m.distance(&Point::new2(0.3, 0.4)).unwrap(), 0.0);
        assert_eq!(m.project(&Point::new2(2.0, 0.0)).unwrap(), Point::new2(1.0, 0.0));
        assert_eq!(m.reach(), f64::INFINITY);
        assert_eq!(m.diameter(), 2.0);
        assert!(m.proximal_normals(&Point::new2(0.0, 0.0)).unwrap().is_empty());
        assert_eq!(m.proximal_normals(&Point::new2(0.0, 1.0)).unwrap(), vec![Point::new2(0.0, 1.0)]);
        assert!(matches!(m.proximal_normals(&Point::new2(0.0, 2.0)), Err(Error::NotOnDomain { .. })));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            unit_disc().distance(&Point::new1(0.0)),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(matches!(gap_domain().project(&Point::new2(0.0, 0.0)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn circle_curve_normals_and_centre() {
        let m = unit_circle();
        assert_eq!(
            m.proximal_normals(&Point::new2(1.0, 0.0)).unwrap(),
            vec![Point::new2(1.0, 0.0), Point::new2(-1.0, 0.0)]
        );
        assert_eq!(m.reach(), 1.0);
        assert!(matches!(m.project(&Point::new2(0.0, 0.0)), Err(Error::OutsideReachTube { .. })));
        assert_eq!(m.distance(&Point::new2(0.0, 0.25)).unwrap(), 0.75);
    }

    #[test]
    fn interval_normals() {
        let m = gap_domain();
        assert!(m.proximal_normals(&Point::new1(0.0)).unwrap().is_empty());
        assert_eq!(m.proximal_normals(&Point::new1(1.0)).unwrap(), vec![Point::new1(1.0)]);
        assert_eq!(m.proximal_normals(&Point::new1(1.5)).unwrap(), vec![Point::new1(-1.0), Point::new1(1.0)]);
    }

    #[test]
    fn sampled_circle_distance_converges() {
        let line = sample_circle(4096, Point::new2(0.0, 0.0), 1.0, 1.0).unwrap();
        let m = Domain::polyline(line);
        let d = m.distance(&Point::new2(0.0, 2.0)).unwrap();
        // Chord sagitta for 4096 vertices is about 2.9e-7.
        assert!((d - 1.0).abs() < 1e-5, "{d}");
    }

    #[test]
    fn region_is_solid() {
        let v = vec![Point::new2(-1.0, -1.0), Point::new2(1.0, -1.0), Point::new2(1.0, 1.0), Point::new2(-1.0, 1.0)];
        let m = Domain::region(Polyline::new(v, true, 0.5).unwrap()).unwrap();
        let inner = Point::new2(0.2, 0.3);
        assert_eq!(m.distance(&inner).unwrap(), 0.0);
        assert_eq!(m.project(&inner).unwrap(), inner);
        assert_eq!(m.project(&Point::new2(1.2, 0.0)).unwrap(), Point::new2(1.0, 0.0));
        assert!(m.proximal_normals(&inner).unwrap().is_empty());
        assert_eq!(m.proximal_normals(&Point::new2(1.0, 0.0)).unwrap(), vec![Point::new2(1.0, 0.0)]);
        // Convex corner keeps its outward cone.
        let corner = m.proximal_normals(&Point::new2(1.0, 1.0)).unwrap();
        assert_eq!(corner.len(), 3);
        assert!(corner.iter().all(|v| v.x() >= 0.0 && v.y() >= 0.0));
    }

    #[test]
    fn spec_round_trip() {
        let raw = r#"{"kind":"interval_union","intervals":[[-1,1],[1.5,1.5]]}"#;
        let spec: DomainSpec = serde_json::from_str(raw).unwrap();
        assert_eq!(spec.build().unwrap().reach(), 0.25);
        let raw = r#"{"kind":"disc","center":[0,0],"radius":1}"#;
        let spec: DomainSpec = serde_json::from_str(raw).unwrap();
        assert_eq!(spec.build().unwrap().dim(), 2);
        let spec: DomainSpec = serde_json::from_str(r#"{"kind":"bean_boundary","n":64}"#).unwrap();
        assert_eq!(spec.build().unwrap().reach(), BEAN_BOUNDARY_REACH);
        assert!(serde_json::from_str::<DomainSpec>(r#"{"kind":"disc","center":[0,0],"radius":1,"x":2}"#).is_err());
        assert!(serde_json::from_str::<DomainSpec>(r#"{"kind":"torus"}"#).is_err());
    }
}
