use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::ParticleState;
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::point::Point;

/// Initial particle configurations. Boxes and grids are given by their lower
/// and upper corners, one coordinate per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// `n` independent uniform draws from the box.
    UniformBox {
        lower: Vec<f64>,
        upper: Vec<f64>,
        n: usize,
    },
    /// Uniform grid with `counts[k]` nodes along axis `k` (endpoints
    /// included), each node moved by a uniform offset in `[-jitter, jitter]`.
    PerturbedGrid {
        lower: Vec<f64>,
        upper: Vec<f64>,
        counts: Vec<usize>,
        jitter: f64,
        #[serde(default)]
        inside_only: bool,
    },
    /// Perturbed grid mapped onto the domain by nearest-point projection.
    ProjectedPerturbedGrid {
        lower: Vec<f64>,
        upper: Vec<f64>,
        counts: Vec<usize>,
        jitter: f64,
    },
    Points {
        points: Vec<Point>,
    },
}

fn check_box(lower: &[f64], upper: &[f64], dim: usize) -> Result<()> {
    if lower.len() != dim || upper.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: lower.len().max(upper.len()) });
    }
    if lower.iter().zip(upper).any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b)) {
        return Err(Error::InvalidConfig(format!("invalid box {lower:?}..{upper:?}")));
    }
    Ok(())
}

fn grid(lower: &[f64], upper: &[f64], counts: &[usize], jitter: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Point>> {
    if counts.len() != lower.len() || counts.contains(&0) {
        return Err(Error::InvalidConfig(format!("invalid grid counts {counts:?}")));
    }
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return Err(Error::InvalidConfig(format!("invalid jitter {jitter}")));
    }
    let node = |k: usize, i: usize| {
        if counts[k] == 1 {
            0.5 * (lower[k] + upper[k])
        } else {
            let t = i as f64 / (counts[k] - 1) as f64;
            (1.0 - t) * lower[k] + t * upper[k]
        }
    };
    let total: usize = counts.iter().product();
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        // First axis varies fastest.
        let mut rem = flat;
        let mut c = [0.0; 2];
        for k in 0..counts.len() {
            let offset = if jitter > 0.0 { rng.gen_range(-jitter..=jitter) } else { 0.0 };
            c[k] = node(k, rem % counts[k]) + offset;
            rem /= counts[k];
        }
        out.push(Point::from_slice(&c[..counts.len()])?);
    }
    Ok(out)
}

/// Draws an initial state; the same `(spec, domain, seed)` always gives the
/// same particles.
pub fn sample_initial(spec: &InitialSpec, domain: &Domain, seed: u64) -> Result<ParticleState> {
    let dim = domain.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = match spec {
        InitialSpec::UniformBox { lower, upper, n } => {
            check_box(lower, upper, dim)?;
            (0..*n)
                .map(|_| {
                    let c: Vec<f64> =
                        lower.iter().zip(upper).map(|(&a, &b)| if a < b { rng.gen_range(a..b) } else { a }).collect();
                    Point::from_slice(&c)
                })
                .collect::<Result<Vec<_>>>()?
        }
        InitialSpec::PerturbedGrid { lower, upper, counts, jitter, inside_only } => {
            check_box(lower, upper, dim)?;
            let mut pts = grid(lower, upper, counts, *jitter, &mut rng)?;
            if *inside_only {
                let mut kept = Vec::with_capacity(pts.len());
                for p in pts {
                    if domain.contains(&p)? {
                        kept.push(p);
                    }
                }
                pts = kept;
            }
            pts
        }
        InitialSpec::ProjectedPerturbedGrid { lower, upper, counts, jitter } => {
            check_box(lower, upper, dim)?;
            grid(lower, upper, counts, *jitter, &mut rng)?
                .iter()
                .map(|p| domain.closest_point(p))
                .collect::<Result<Vec<_>>>()?
        }
        InitialSpec::Points { points } => {
            for p in points {
                p.check_dim(dim)?;
            }
            points.clone()
        }
    };
    ParticleState::new(positions)
}
