//! Descriptive statistics of particle configurations.

use serde::Serialize;

use crate::point::Point;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub center: Point,
    pub count: usize,
}

/// Single-linkage clusters: particles closer than `radius` (directly or via
/// a chain) share a cluster. Clusters are ordered by their lowest particle
/// index.
pub fn clusters(points: &[Point], radius: f64) -> Vec<Cluster> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let r2 = radius * radius;
    for i in 0..n {
        for j in i + 1..n {
            if points[i].dist_sq(&points[j]) < r2 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut out: Vec<(Point, usize)> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            out.push((Point::zero(p.dim()), 0));
        }
        let c = &mut out[slot[root]];
        c.0 += *p;
        c.1 += 1;
    }
    out.into_iter().map(|(sum, count)| Cluster { center: sum * (1.0 / count as f64), count }).collect()
}

/// Largest relative deviation of the angular gaps between consecutive
/// particles from the uniform gap `2π/m`. Zero for equally spaced angles.
pub fn angular_gap_discrepancy(points: &[Point], center: Point) -> f64 {
    let m = points.len();
    if m < 2 {
        return 0.0;
    }
    let mut angles: Vec<f64> = points
        .iter()
        .map(|p| {
            let d = *p - center;
            d.y().atan2(d.x())
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let uniform = std::f64::consts::TAU / m as f64;
    let wrap = angles[0] + std::f64::consts::TAU - angles[m - 1];
    angles
        .windows(2)
        .map(|w| w[1] - w[0])
        .chain(std::iter::once(wrap))
        .map(|g| (g / uniform - 1.0).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clusters_by_chains() {
        let pts = vec![
            Point::new2(0.0, 0.0),
            Point::new2(5.0, 0.0),
            Point::new2(0.015, 0.0),
            Point::new2(0.03, 0.0),
            Point::new2(5.0, 0.001),
        ];
        let c = clusters(&pts, 0.02);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].count, 3);
        assert!((c[0].center.x() - 0.015).abs() < 1e-15);
        assert_eq!(c[1].count, 2);
        assert_eq!(clusters(&pts, 10.0).len(), 1);
        assert_eq!(clusters(&pts, 1e-6).len(), 5);
    }

    #[test]
    fn gap_discrepancy() {
        let ring: Vec<Point> = (0..12)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 12.0;
                Point::new2(t.cos(), t.sin())
            })
            .collect();
        assert!(angular_gap_discrepancy(&ring, Point::new2(0.0, 0.0)) < 1e-12);
        let mut lumpy = ring.clone();
        lumpy[1] = lumpy[0];
        let d = angular_gap_discrepancy(&lumpy, Point::new2(0.0, 0.0));
        assert!((d - 1.0).abs() < 1e-12);
    }
}
