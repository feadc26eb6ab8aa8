//! Piecewise-linear curves and the regions they bound.
//!
//! Closest-point queries are exact over all segments. A uniform bucket grid
//! prunes the search; the candidate order does not matter because hits are
//! compared on `(squared distance, segment index)`, which reproduces the
//! lowest-index tie break of a plain linear scan bit for bit.

use crate::error::{Error, Result};
use crate::point::Point;

/// Result of a closest-point query against a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentHit {
    pub dist_sq: f64,
    pub segment: usize,
    /// Curve parameter along the segment, in `[0, 1]`.
    pub t: f64,
    pub point: Point,
}

impl SegmentHit {
    #[inline]
    fn better_than(&self, other: &SegmentHit) -> bool {
        self.dist_sq < other.dist_sq || (self.dist_sq == other.dist_sq && self.segment < other.segment)
    }
}

#[inline]
fn closest_on_segment(a: Point, b: Point, q: Point, segment: usize) -> SegmentHit {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    let t = ((q - a).dot(&ab) / len_sq).clamp(0.0, 1.0);
    let point = a + ab * t;
    SegmentHit { dist_sq: q.dist_sq(&point), segment, t, point }
}

/// Uniform grid of buckets holding the indices of the segments whose bounding
/// boxes overlap each cell.
#[derive(Debug, Clone)]
struct SegmentGrid {
    origin: [f64; 2],
    cell: f64,
    nx: i64,
    ny: i64,
    // CSR layout: cell c owns items[offsets[c]..offsets[c + 1]].
    offsets: Vec<u32>,
    items: Vec<u32>,
    // Segments crossing each horizontal band, for the even-odd test.
    band_offsets: Vec<u32>,
    band_items: Vec<u32>,
}

impl SegmentGrid {
    fn build(vertices: &[Point], segments: usize) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for v in vertices {
            lo[0] = lo[0].min(v.x());
            lo[1] = lo[1].min(v.y());
            hi[0] = hi[0].max(v.x());
            hi[1] = hi[1].max(v.y());
        }
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let per_side = (segments as f64).sqrt().ceil().max(1.0);
        let cell = if extent > 0.0 { extent / per_side } else { 1.0 };
        let nx = (((hi[0] - lo[0]) / cell).floor() as i64 + 1).max(1);
        let ny = (((hi[1] - lo[1]) / cell).floor() as i64 + 1).max(1);

        let mut grid = SegmentGrid {
            origin: lo,
            cell,
            nx,
            ny,
            offsets: Vec::new(),
            items: Vec::new(),
            band_offsets: Vec::new(),
            band_items: Vec::new(),
        };

        let n = vertices.len();
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); (nx * ny) as usize];
        let mut bands: Vec<Vec<u32>> = vec![Vec::new(); ny as usize];
        for s in 0..segments {
            let a = vertices[s];
            let b = vertices[(s + 1) % n];
            let (i0, j0) = grid.cell_of(a.x().min(b.x()), a.y().min(b.y()));
            let (i1, j1) = grid.cell_of(a.x().max(b.x()), a.y().max(b.y()));
            let (i0, i1) = (i0.clamp(0, nx - 1), i1.clamp(0, nx - 1));
            let (j0, j1) = (j0.clamp(0, ny - 1), j1.clamp(0, ny - 1));
            for j in j0..=j1 {
                bands[j as usize].push(s as u32);
                for i in i0..=i1 {
                    buckets[(j * nx + i) as usize].push(s as u32);
                }
            }
        }
        (grid.offsets, grid.items) = flatten(buckets);
        (grid.band_offsets, grid.band_items) = flatten(bands);
        grid
    }

    #[inline]
    fn cell_of(&self, x: f64, y: f64) -> (i64, i64) {
        (((x - self.origin[0]) / self.cell).floor() as i64, ((y - self.origin[1]) / self.cell).floor() as i64)
    }

    #[inline]
    fn bucket(&self, i: i64, j: i64) -> &[u32] {
        let c = (j * self.nx + i) as usize;
        &self.items[self.offsets[c] as usize..self.offsets[c + 1] as usize]
    }

    fn band(&self, y: f64) -> Option<&[u32]> {
        let j = ((y - self.origin[1]) / self.cell).floor();
        if !(j >= 0.0 && (j as i64) < self.ny) {
            return None;
        }
        let j = j as usize;
        Some(&self.band_items[self.band_offsets[j] as usize..self.band_offsets[j + 1] as usize])
    }
}

fn flatten(lists: Vec<Vec<u32>>) -> (Vec<u32>, Vec<u32>) {
    let mut offsets = Vec::with_capacity(lists.len() + 1);
    let mut items = Vec::with_capacity(lists.iter().map(Vec::len).sum());
    offsets.push(0);
    for l in lists {
        items.extend_from_slice(&l);
        offsets.push(items.len() as u32);
    }
    (offsets, items)
}

/// An ordered chain of 2D vertices, optionally closed, with a declared reach.
#[derive(Debug, Clone)]
pub struct Polyline {
    vertices: Vec<Point>,
    closed: bool,
    declared_reach: f64,
    diameter: f64,
    grid: SegmentGrid,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>, closed: bool, declared_reach: f64) -> Result<Self> {
        if declared_reach.is_nan() || declared_reach <= 0.0 {
            return Err(Error::InvalidDomain(format!("polyline reach must be positive, got {declared_reach}")));
        }
        if vertices.len() < 2 {
            return Err(Error::InvalidDomain("polyline needs at least 2 vertices".into()));
        }
        for v in &vertices {
            v.check_dim(2)?;
            if !v.is_finite() {
                return Err(Error::InvalidDomain("non-finite polyline vertex".into()));
            }
        }
        for (k, w) in vertices.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(Error::InvalidDomain(format!("repeated consecutive vertex at {k}")));
            }
        }
        if closed && vertices.first() == vertices.last() {
            return Err(Error::InvalidDomain("closed polyline must not repeat its first vertex at the end".into()));
        }
        let segments = if closed { vertices.len() } else { vertices.len() - 1 };
        let grid = SegmentGrid::build(&vertices, segments);
        let diameter = vertex_diameter(&vertices);
        Ok(Polyline { vertices, closed, declared_reach, diameter, grid })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn declared_reach(&self) -> f64 {
        self.declared_reach
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    #[inline]
    pub fn segment(&self, s: usize) -> (Point, Point) {
        (self.vertices[s], self.vertices[(s + 1) % self.vertices.len()])
    }

    /// Total arc length.
    pub fn length(&self) -> f64 {
        (0..self.segment_count())
            .map(|s| {
                let (a, b) = self.segment(s);
                a.dist(&b)
            })
            .sum()
    }

    /// Exact closest point by scanning every segment.
    pub fn closest_linear(&self, q: Point) -> SegmentHit {
        let mut best = closest_on_segment(self.vertices[0], self.vertices[1], q, 0);
        for s in 1..self.segment_count() {
            let (a, b) = self.segment(s);
            let hit = closest_on_segment(a, b, q, s);
            if hit.better_than(&best) {
                best = hit;
            }
        }
        best
    }

    /// Exact closest point, pruned with the bucket grid.
    pub fn closest(&self, q: Point) -> SegmentHit {
        let g = &self.grid;
        let (ci, cj) = g.cell_of(q.x(), q.y());
        // Rings closer than this contain no grid cells.
        let gap_i = (-ci).max(ci - (g.nx - 1)).max(0);
        let gap_j = (-cj).max(cj - (g.ny - 1)).max(0);
        let mut best: Option<SegmentHit> = None;
        let mut k = gap_i.max(gap_j);
        loop {
            self.visit_ring(ci, cj, k, q, &mut best);
            let covers = ci - k <= 0 && cj - k <= 0 && ci + k >= g.nx - 1 && cj + k >= g.ny - 1;
            if covers {
                break;
            }
            if let Some(b) = &best {
                let left = q.x() - (g.origin[0] + (ci - k) as f64 * g.cell);
                let right = g.origin[0] + (ci + k + 1) as f64 * g.cell - q.x();
                let down = q.y() - (g.origin[1] + (cj - k) as f64 * g.cell);
                let up = g.origin[1] + (cj + k + 1) as f64 * g.cell - q.y();
                let bound = left.min(right).min(down).min(up);
                if bound > 0.0 && bound * bound > b.dist_sq {
                    break;
                }
            }
            k += 1;
        }
        best.expect("grid covers every segment")
    }

    fn visit_ring(&self, ci: i64, cj: i64, k: i64, q: Point, best: &mut Option<SegmentHit>) {
        let g = &self.grid;
        let mut scan = |i: i64, j: i64| {
            for &s in g.bucket(i, j) {
                let (a, b) = self.segment(s as usize);
                let hit = closest_on_segment(a, b, q, s as usize);
                if best.as_ref().is_none_or(|cur| hit.better_than(cur)) {
                    *best = Some(hit);
                }
            }
        };
        if k == 0 {
            if (0..g.nx).contains(&ci) && (0..g.ny).contains(&cj) {
                scan(ci, cj);
            }
            return;
        }
        let (i_lo, i_hi) = ((ci - k).max(0), (ci + k).min(g.nx - 1));
        for j in [cj - k, cj + k] {
            if (0..g.ny).contains(&j) {
                for i in i_lo..=i_hi {
                    scan(i, j);
                }
            }
        }
        let (j_lo, j_hi) = ((cj - k + 1).max(0), (cj + k - 1).min(g.ny - 1));
        for i in [ci - k, ci + k] {
            if (0..g.nx).contains(&i) {
                for j in j_lo..=j_hi {
                    scan(i, j);
                }
            }
        }
    }

    /// Even-odd point-in-polygon test. Only meaningful for closed polylines.
    pub fn encloses(&self, q: Point) -> bool {
        let Some(band) = self.grid.band(q.y()) else {
            return false;
        };
        let mut inside = false;
        for &s in band {
            let (a, b) = self.segment(s as usize);
            if (a.y() > q.y()) != (b.y() > q.y()) {
                let x_cross = a.x() + (q.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
                if q.x() < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Twice the signed area; positive for counter-clockwise closed curves.
    pub fn signed_area2(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|k| {
                let a = self.vertices[k];
                let b = self.vertices[(k + 1) % n];
                a.x() * b.y() - b.x() * a.y()
            })
            .sum()
    }

    /// Proximal normals of the curve at `p`, which must lie on it.
    ///
    /// Interior segment points get both unit normals. At a vertex only the
    /// reflex side carries normals, sampled as the two segment normals and
    /// their bisector. Open endpoints also get the outward tangent.
    pub fn curve_normals(&self, hit: &SegmentHit, tol: f64) -> Vec<Point> {
        let n = self.vertices.len();
        let (a, b) = self.segment(hit.segment);
        let vertex = if hit.point.dist(&a) <= tol {
            Some(hit.segment)
        } else if hit.point.dist(&b) <= tol {
            Some((hit.segment + 1) % n)
        } else {
            None
        };
        let normal_of = |a: Point, b: Point| {
            let d = (b - a).normalized().expect("segments have positive length");
            Point::new2(-d.y(), d.x())
        };
        match vertex {
            None => {
                let nl = normal_of(a, b);
                vec![nl, -nl]
            }
            Some(k) if !self.closed && (k == 0 || k == n - 1) => {
                let (from, to) = if k == 0 {
                    (self.vertices[1], self.vertices[0])
                } else {
                    (self.vertices[n - 2], self.vertices[n - 1])
                };
                let out = (to - from).normalized().expect("segments have positive length");
                let nl = normal_of(from, to);
                vec![out, nl, -nl]
            }
            Some(k) => {
                let prev = self.vertices[(k + n - 1) % n];
                let cur = self.vertices[k];
                let next = self.vertices[(k + 1) % n];
                reflex_normals(prev, cur, next)
            }
        }
    }
}

/// Proximal normals at the corner `cur` of the chain `prev -> cur -> next`.
pub(crate) fn reflex_normals(prev: Point, cur: Point, next: Point) -> Vec<Point> {
    let d1 = (cur - prev).normalized().expect("segments have positive length");
    let d2 = (next - cur).normalized().expect("segments have positive length");
    let cross = d1.x() * d2.y() - d1.y() * d2.x();
    let left = |d: Point| Point::new2(-d.y(), d.x());
    if cross == 0.0 && d1.dot(&d2) > 0.0 {
        let nl = left(d1);
        return vec![nl, -nl];
    }
    // A left turn leaves the reflex angle on the right.
    let (n1, n2) = if cross > 0.0 { (-left(d1), -left(d2)) } else { (left(d1), left(d2)) };
    let mut out = vec![n1, n2];
    if let Some(bis) = (n1 + n2).normalized() {
        out.insert(1, bis);
    }
    out
}

fn vertex_diameter(vertices: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            best = best.max(a.dist_sq(b));
        }
    }
    best.sqrt()
}

/// Closed polyline sampling a circle, counter-clockwise from angle 0.
pub fn sample_circle(n: usize, center: Point, radius: f64, declared_reach: f64) -> Result<Polyline> {
    if n < 3 {
        return Err(Error::InvalidResolution(n));
    }
    let vertices = (0..n)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / n as f64;
            Point::new2(center.x() + radius * th.cos(), center.y() + radius * th.sin())
        })
        .collect();
    Polyline::new(vertices, true, declared_reach)
}
