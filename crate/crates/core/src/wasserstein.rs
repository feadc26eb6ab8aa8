//! Quadratic Wasserstein distance between uniform empirical measures of equal
//! size.
//!
//! With equal masses an optimal plan can be taken to be a permutation, so
//! `d₂` reduces to a balanced linear assignment problem with squared
//! Euclidean costs.

use crate::error::{Error, Result};
use crate::point::Point;

/// Largest size accepted by [`w2_bruteforce`].
pub const BRUTEFORCE_MAX: usize = 8;

fn check_sizes(a: &[Point], b: &[Point]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::EmptySample);
    }
    let dim = a[0].dim();
    for p in a.iter().chain(b) {
        p.check_dim(dim)?;
    }
    Ok(())
}

/// Adds the matched costs in ascending order so the total does not depend on
/// which side is listed first.
fn canonical_mean(mut costs: Vec<f64>) -> f64 {
    costs.sort_by(f64::total_cmp);
    let n = costs.len() as f64;
    costs.iter().fold(0.0, |acc, c| acc + c) / n
}

/// Monotone-rearrangement distance for one-dimensional measures.
pub fn w2_1d(a: &[Point], b: &[Point]) -> Result<f64> {
    check_sizes(a, b)?;
    if a[0].dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: a[0].dim() });
    }
    let mut xa: Vec<f64> = a.iter().map(Point::x).collect();
    let mut xb: Vec<f64> = b.iter().map(Point::x).collect();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let costs = xa.iter().zip(&xb).map(|(p, q)| (p - q) * (p - q)).collect();
    Ok(canonical_mean(costs).sqrt())
}

/// Exact `d₂` through the optimal assignment; any dimension.
pub fn w2_assignment(a: &[Point], b: &[Point]) -> Result<f64> {
    check_sizes(a, b)?;
    let n = a.len();
    let cost: Vec<f64> = a.iter().flat_map(|p| b.iter().map(move |q| p.dist_sq(q))).collect();
    let perm = solve_assignment(n, &cost);
    let costs = perm.iter().enumerate().map(|(i, &j)| cost[i * n + j]).collect();
    Ok(canonical_mean(costs).sqrt())
}

/// Minimum over all `N!` matchings; test oracle for small measures.
pub fn w2_bruteforce(a: &[Point], b: &[Point]) -> Result<f64> {
    check_sizes(a, b)?;
    let n = a.len();
    if n > BRUTEFORCE_MAX {
        return Err(Error::SizeTooLarge { n, max: BRUTEFORCE_MAX });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    let mut best_perm = perm.clone();
    // Heap's algorithm, iterative form.
    let mut c = vec![0usize; n];
    let mut visit = |p: &[usize]| {
        let s: f64 = p.iter().enumerate().map(|(i, &j)| a[i].dist_sq(&b[j])).sum();
        if s < best {
            best = s;
            best_perm.copy_from_slice(p);
        }
    };
    visit(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let costs = best_perm.iter().enumerate().map(|(i, &j)| a[i].dist_sq(&b[j])).collect();
    Ok(canonical_mean(costs).sqrt())
}

/// Shortest augmenting path Hungarian method on a dense row-major `n x n`
/// cost matrix. Returns `perm` with row `i` assigned to column `perm[i]`.
pub fn solve_assignment(n: usize, cost: &[f64]) -> Vec<usize> {
    debug_assert_eq!(cost.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    // 1-based potentials; column 0 is the virtual source.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0f64; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            let row = &cost[(i0 - 1) * n..i0 * n];
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = row[j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        if row_of[j] > 0 {
            perm[row_of[j] - 1] = j - 1;
        }
    }
    perm
}
