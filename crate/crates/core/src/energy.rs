//! Discrete interaction and penalised energies of equal-mass particle systems
//! and their per-particle gradients.
//!
//! Every particle carries mass `1/N`. The "forces" returned here are the
//! scaled gradients `N ∇_i E`, so the descent direction is `-F_i`.
//!
//! Per-particle sums always run over `j` in ascending order and totals add the
//! per-particle rows in ascending `i`, so results are bitwise identical for any
//! number of worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::point::Point;
use crate::potential::Potential;

/// Below this many particles the loops stay on the calling thread.
const PARALLEL_MIN_PARTICLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    pub positions: Vec<Point>,
    pub time: f64,
    pub step: usize,
}

impl ParticleState {
    pub fn new(positions: Vec<Point>) -> Result<Self> {
        let Some(first) = positions.first() else {
            return Err(Error::EmptySample);
        };
        let dim = first.dim();
        for p in &positions {
            p.check_dim(dim)?;
            if !p.is_finite() {
                return Err(Error::InvalidPoint("non-finite particle position".into()));
            }
        }
        Ok(ParticleState { positions, time: 0.0, step: 0 })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.positions[0].dim()
    }

    pub fn is_finite(&self) -> bool {
        self.positions.iter().all(Point::is_finite)
    }
}

/// Maps `f` over particle indices, in parallel for large systems.
pub(crate) fn per_particle<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if n >= PARALLEL_MIN_PARTICLES {
        (0..n).into_par_iter().with_min_len(8).map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

fn ordered_sum(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc + v)
}

/// `E_N = (1/2N²) Σ_i Σ_j W(x_i - x_j)`, self-pairs included.
pub fn interaction_energy(state: &ParticleState, w: &Potential) -> f64 {
    let x = &state.positions;
    let n = x.len();
    let rows = per_particle(n, |i| {
        let xi = x[i];
        x.iter().fold(0.0, |acc, xj| acc + w.eval(&(xi - *xj)))
    });
    ordered_sum(&rows) / (2.0 * (n * n) as f64)
}

/// `E_N` with the `j = i` terms removed, i.e. shifted by `-W(0)/(2N)`.
pub fn interaction_energy_without_self(state: &ParticleState, w: &Potential) -> f64 {
    let n = state.len();
    interaction_energy(state, w) - w.eval(&Point::zero(state.dim())) / (2.0 * n as f64)
}

/// Squared distances to the domain, one per particle.
pub fn squared_distances(state: &ParticleState, domain: &Domain) -> Result<Vec<f64>> {
    let x = &state.positions;
    per_particle(x.len(), |i| domain.distance(&x[i]).map(|d| d * d)).into_iter().collect()
}

/// Mean squared distance `(1/N) Σ d_M(x_i)²`.
pub fn penalty_moment(state: &ParticleState, domain: &Domain) -> Result<f64> {
    Ok(ordered_sum(&squared_distances(state, domain)?) / state.len() as f64)
}

/// `E_{ε,N} = E_N + (1/(N ε)) Σ_i d_M(x_i)²`.
pub fn penalized_energy(state: &ParticleState, w: &Potential, domain: &Domain, eps: f64) -> Result<f64> {
    let penalty = ordered_sum(&squared_distances(state, domain)?);
    Ok(interaction_energy(state, w) + penalty / (state.len() as f64 * eps))
}

/// `F_i = N ∇_i E_N = (1/N) Σ_{j≠i} ∇W(x_i - x_j)`.
pub fn interaction_force(state: &ParticleState, w: &Potential) -> Vec<Point> {
    let x = &state.positions;
    let n = x.len();
    let inv_n = 1.0 / n as f64;
    let dim = state.dim();
    per_particle(n, |i| {
        let xi = x[i];
        let mut acc = Point::zero(dim);
        for (j, xj) in x.iter().enumerate() {
            if j != i {
                acc += w.grad(&(xi - *xj));
            }
        }
        acc * inv_n
    })
}

/// `F_i = N ∇_i E_{ε,N}`: interaction plus `(2/ε)(x_i - Π_M x_i)`.
///
/// The penalty gradient needs a unique closest point, so exact ties (for
/// example the midpoint of a gap) are reported as errors.
pub fn penalized_force(state: &ParticleState, w: &Potential, domain: &Domain, eps: f64) -> Result<Vec<Point>> {
    let x = &state.positions;
    let nearest: Vec<Point> =
        per_particle(x.len(), |i| domain.closest_point(&x[i])).into_iter().collect::<Result<_>>()?;
    let mut forces = interaction_force(state, w);
    let k = 2.0 / eps;
    for ((f, xi), pi) in forces.iter_mut().zip(x).zip(&nearest) {
        *f += (*xi - *pi) * k;
    }
    Ok(forces)
}

/// Euclidean norm of the stacked gradient `(∇_1 E, …, ∇_N E)` given the scaled
/// forces `N ∇_i E`.
pub fn gradient_norm(forces: &[Point]) -> f64 {
    let n = forces.len() as f64;
    forces.iter().fold(0.0, |acc, f| acc + f.norm_sq()).sqrt() / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const REP1: Potential = Potential::InverseQuadratic { sign: 1.0, scale: 1.0 };

    fn state(points: Vec<Point>) -> ParticleState {
        ParticleState::new(points).unwrap()
    }

    fn line(xs: &[f64]) -> ParticleState {
        state(xs.iter().map(|&x| Point::new1(x)).collect())
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize, half: f64) -> ParticleState {
        state((0..n).map(|_| Point::new2(rng.gen_range(-half..half), rng.gen_range(-half..half))).collect())
    }

    fn naive_energy(x: &[Point], w: &Potential) -> f64 {
        let n = x.len() as f64;
        let mut s = 0.0;
        for a in x {
            for b in x {
                s += w.eval(&(*a - *b));
            }
        }
        s / (2.0 * n * n)
    }

    /// Central-difference gradient of `energy`, scaled by N.
    fn fd_forces(x: &[Point], h: f64, energy: impl Fn(&[Point]) -> f64) -> Vec<Point> {
        let n = x.len() as f64;
        let mut out = Vec::new();
        for i in 0..x.len() {
            let mut g = [0.0; 2];
            for (d, gd) in g.iter_mut().enumerate().take(x[i].dim()) {
                let e = if d == 0 { Point::new2(h, 0.0) } else { Point::new2(0.0, h) };
                let e = if x[i].dim() == 1 { Point::new1(h) } else { e };
                let mut plus = x.to_vec();
                let mut minus = x.to_vec();
                plus[i] += e;
                minus[i] -= e;
                *gd = n * (energy(&plus) - energy(&minus)) / (2.0 * h);
            }
            out.push(if x[i].dim() == 1 { Point::new1(g[0]) } else { Point::new2(g[0], g[1]) });
        }
        out
    }

    #[test]
    fn interaction_energy_examples() {
        let d = 0.7;
        let e = interaction_energy(&line(&[0.0, d]), &Potential::Quadratic);
        assert!((e - d * d / 4.0).abs() < 1e-16);
        for w in [Potential::Quadratic, REP1] {
            let single = line(&[0.3]);
            assert_eq!(interaction_energy(&single, &w), w.eval(&Point::new1(0.0)) / 2.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_state(&mut rng, 4, 1.0);
        assert!((interaction_energy(&s, &REP1) - naive_energy(&s.positions, &REP1)).abs() < 1e-14);
        let without = interaction_energy_without_self(&s, &REP1);
        assert!((interaction_energy(&s, &REP1) - without - 1.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn penalized_energy_examples() {
        let unit = Domain::interval_union(vec![(-1.0, 1.0)]).unwrap();
        let on = line(&[-0.5, 0.2, 1.0]);
        assert_eq!(
            penalized_energy(&on, &Potential::Quadratic, &unit, 0.3).unwrap(),
            interaction_energy(&on, &Potential::Quadratic)
        );
        let one = line(&[2.0]);
        assert_eq!(penalized_energy(&one, &Potential::Quadratic, &unit, 0.1).unwrap(), 10.0);

        let disc = Domain::disc(Point::new2(0.0, 0.0), 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = random_state(&mut rng, 3, 1.4);
        let eps = 0.05;
        let mut oracle = naive_energy(&s.positions, &REP1);
        for p in &s.positions {
            let d = (p.norm() - 1.0).max(0.0);
            oracle += d * d / (3.0 * eps);
        }
        assert!((penalized_energy(&s, &REP1, &disc, eps).unwrap() - oracle).abs() < 1e-14);
    }

    #[test]
    fn force_examples() {
        let f = interaction_force(&line(&[1.0, -1.0]), &Potential::Quadratic);
        assert_eq!(f, vec![Point::new1(2.0), Point::new1(-2.0)]);
        assert_eq!(interaction_force(&line(&[0.4]), &REP1), vec![Point::new1(0.0)]);

        let unit = Domain::interval_union(vec![(-1.0, 1.0)]).unwrap();
        let f = penalized_force(&line(&[2.0]), &Potential::Quadratic, &unit, 0.1).unwrap();
        assert_eq!(f, vec![Point::new1(20.0)]);
        assert_eq!(gradient_norm(&f), 20.0);
        let on = line(&[0.5]);
        assert_eq!(penalized_force(&on, &REP1, &unit, 0.1).unwrap(), vec![Point::new1(0.0)]);

        let gap = Domain::interval_union(vec![(-1.0, 1.0), (1.5, 1.5)]).unwrap();
        assert!(matches!(penalized_force(&line(&[1.25]), &REP1, &gap, 0.1), Err(Error::AmbiguousProjection { .. })));
    }

    #[test]
    fn gradient_norm_examples() {
        assert_eq!(gradient_norm(&[Point::new2(0.0, 0.0); 3]), 0.0);
        let s = line(&[0.2, 0.2]);
        let f = interaction_force(&s, &Potential::Quadratic);
        assert!(gradient_norm(&f) <= 1e-15);
    }

    #[test]
    fn forces_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for w in [Potential::Quadratic, REP1, Potential::InverseQuadratic { sign: -1.0, scale: 10.0 }] {
            let s = random_state(&mut rng, 5, 1.0);
            let f = interaction_force(&s, &w);
            let fd = fd_forces(&s.positions, 1e-6, |x| naive_energy(x, &w));
            for (a, b) in f.iter().zip(&fd) {
                assert!((*a - *b).norm() < 1e-6, "{a:?} vs {b:?}");
            }
        }
        let disc = Domain::disc(Point::new2(0.0, 0.0), 1.0).unwrap();
        let s = random_state(&mut rng, 4, 1.3);
        let eps = 0.2;
        let f = penalized_force(&s, &REP1, &disc, eps).unwrap();
        let fd = fd_forces(&s.positions, 1e-6, |x| {
            penalized_energy(&ParticleState::new(x.to_vec()).unwrap(), &REP1, &disc, eps).unwrap()
        });
        for (a, b) in f.iter().zip(&fd) {
            assert!((*a - *b).norm() < 1e-5, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn parallel_and_serial_agree_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = random_state(&mut rng, 300, 1.5);
        let disc = Domain::disc(Point::new2(0.0, 0.0), 1.0).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                (
                    interaction_energy(&s, &REP1).to_bits(),
                    penalized_energy(&s, &REP1, &disc, 0.1).unwrap().to_bits(),
                    penalized_force(&s, &REP1, &disc, 0.1).unwrap(),
                )
            })
        };
        assert_eq!(run(1), run(4));
    }

    fn small_state() -> impl Strategy<Value = Vec<Point>> {
        prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5), 1..10)
            .prop_map(|v| v.into_iter().map(|(x, y)| Point::new2(x, y)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn penalized_forces_match_fd(x in small_state(), eps in 0.05f64..1.0) {
            let disc = Domain::disc(Point::new2(0.0, 0.0), 1.0).unwrap();
            let s = ParticleState::new(x.clone()).unwrap();
            let f = penalized_force(&s, &REP1, &disc, eps).unwrap();
            let fd = fd_forces(&x, 1e-6, |y| {
                penalized_energy(&ParticleState::new(y.to_vec()).unwrap(), &REP1, &disc, eps).unwrap()
            });
            for (a, b) in f.iter().zip(&fd) {
                prop_assert!((*a - *b).norm() <= 1e-5 * a.norm().max(1.0), "{:?} vs {:?}", a, b);
            }
        }

        #[test]
        fn translation_leaves_forces_unchanged(x in small_state(), vx in -16i32..16, vy in -16i32..16) {
            // Dyadic coordinates and shifts keep every pairwise difference exact.
            let snap = |p: &Point| Point::new2((p.x() * 1024.0).round() / 1024.0, (p.y() * 1024.0).round() / 1024.0);
            let x: Vec<Point> = x.iter().map(snap).collect();
            let v = Point::new2(vx as f64 / 8.0, vy as f64 / 8.0);
            let s = ParticleState::new(x.clone()).unwrap();
            let t = ParticleState::new(x.iter().map(|p| *p + v).collect()).unwrap();
            prop_assert_eq!(interaction_force(&s, &REP1), interaction_force(&t, &REP1));
        }

        #[test]
        fn forces_sum_to_zero(x in small_state()) {
            let s = ParticleState::new(x).unwrap();
            for w in [Potential::Quadratic, REP1] {
                let total = interaction_force(&s, &w).into_iter().fold(Point::zero(2), |a, b| a + b);
                prop_assert!(total.norm() < 1e-12);
            }
        }

        #[test]
        fn penalty_is_nonnegative(x in small_state(), eps in 0.01f64..1.0) {
            let disc = Domain::disc(Point::new2(0.0, 0.0), 1.0).unwrap();
            let s = ParticleState::new(x).unwrap();
            let pe = penalized_energy(&s, &REP1, &disc, eps).unwrap();
            let ie = interaction_energy(&s, &REP1);
            let on_m = s.positions.iter().all(|p| disc.contains(p).unwrap());
            prop_assert!(pe >= ie);
            prop_assert_eq!(pe == ie, on_m);
        }
    }
}
