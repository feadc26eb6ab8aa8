//! Time stepping: the penalised (ε-confinement) forward Euler scheme, the
//! propagate-then-project splitting scheme, step-size selection and the
//! simulation driver.

mod config;
mod sampling;

pub use config::{Scheme, SchemeConfig, StepSize, Stopping};
pub use sampling::{sample_initial, InitialSpec};

use crate::energy::{
    gradient_norm, interaction_energy, interaction_force, penalized_energy, penalized_force, penalty_moment,
    ParticleState,
};
use crate::error::{Error, Result};
use crate::geometry::{Domain, ON_DOMAIN_TOL};
use crate::point::Point;
use crate::potential::Potential;

/// Sufficient-decrease constant of the backtracking linesearch.
pub const ARMIJO_C: f64 = 1e-4;
/// Number of halvings before the linesearch gives up.
pub const MAX_HALVINGS: usize = 60;
/// Per-step slack of the energy monotonicity diagnostic.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Radius `R` of a ball containing all differences of points within the
/// reach tube, `M_r - M_r ⊂ B_R` with `r` the reach. For infinite reach the
/// particles never leave `M` and the diameter suffices.
pub fn enclosure_radius(domain: &Domain) -> f64 {
    let reach = domain.reach();
    if reach.is_finite() {
        2.0 * (0.5 * domain.diameter() + reach)
    } else {
        domain.diameter()
    }
}

/// Largest step keeping one free Euler step inside the reach tube,
/// `reach / (8 sup_{B_R} |∇W|)`; infinite for convex domains.
pub fn max_stable_tau(domain: &Domain, w: &Potential) -> f64 {
    let reach = domain.reach();
    if !reach.is_finite() {
        return f64::INFINITY;
    }
    reach / (8.0 * w.grad_bound(enclosure_radius(domain)))
}

/// One step of the penalised flow, `x_i <- x_i - τ N ∇_i E_{ε,N}`.
pub fn epsilon_step(
    state: &ParticleState,
    w: &Potential,
    domain: &Domain,
    tau: f64,
    eps: f64,
) -> Result<ParticleState> {
    let forces = penalized_force(state, w, domain, eps)?;
    let next = free_step(state, &forces, tau);
    check_finite(&next)?;
    Ok(next)
}

/// One splitting step: free Euler step of the interaction, then projection
/// of every particle onto the domain.
pub fn projected_step(state: &ParticleState, w: &Potential, domain: &Domain, tau: f64) -> Result<ParticleState> {
    let forces = interaction_force(state, w);
    let next = project_all(&free_step(state, &forces, tau), domain)?;
    check_finite(&next)?;
    Ok(next)
}

fn free_step(state: &ParticleState, forces: &[Point], tau: f64) -> ParticleState {
    let step = state.step + 1;
    ParticleState {
        positions: state.positions.iter().zip(forces).map(|(x, f)| *x - *f * tau).collect(),
        time: step as f64 * tau,
        step,
    }
}

fn project_all(state: &ParticleState, domain: &Domain) -> Result<ParticleState> {
    let positions = crate::energy::per_particle(state.len(), |i| domain.project(&state.positions[i]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ParticleState { positions, ..state.clone() })
}

fn check_finite(state: &ParticleState) -> Result<()> {
    if state.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteState { step: state.step })
    }
}

/// Scheme-specific evaluation of energies, forces and steps.
struct Stepper<'a> {
    scheme: Scheme,
    w: &'a Potential,
    domain: &'a Domain,
}

impl Stepper<'_> {
    fn forces(&self, state: &ParticleState) -> Result<Vec<Point>> {
        match self.scheme {
            Scheme::EpsilonFlow { eps } => penalized_force(state, self.w, self.domain, eps),
            Scheme::Projected => Ok(interaction_force(state, self.w)),
        }
    }

    fn energy(&self, state: &ParticleState) -> Result<f64> {
        match self.scheme {
            Scheme::EpsilonFlow { eps } => penalized_energy(state, self.w, self.domain, eps),
            Scheme::Projected => Ok(interaction_energy(state, self.w)),
        }
    }

    fn advance(&self, state: &ParticleState, forces: &[Point], tau: f64) -> Result<ParticleState> {
        let next = free_step(state, forces, tau);
        let next = match self.scheme {
            Scheme::EpsilonFlow { .. } => next,
            Scheme::Projected => project_all(&next, self.domain)?,
        };
        check_finite(&next)?;
        Ok(next)
    }
}

/// Backtracking (Armijo) choice of the constant step size.
///
/// Starts from `min(1, max_stable_tau)` and halves until one trial step
/// lowers the scheme's energy by at least `1e-4 τ N |G|²`, where `G` is the
/// gradient for the penalised flow and the projected-gradient mapping
/// `(x - x⁺)/(τN)` for the splitting scheme (the two coincide without a
/// projection).
pub fn backtracking_linesearch(
    state: &ParticleState,
    w: &Potential,
    domain: &Domain,
    config: &SchemeConfig,
) -> Result<f64> {
    let stepper = Stepper { scheme: config.scheme, w, domain };
    let tau0 = max_stable_tau(domain, w).min(1.0);
    let forces = stepper.forces(state)?;
    if gradient_norm(&forces) < config.tol {
        return Ok(tau0);
    }
    linesearch_from(&stepper, state, &forces, tau0)
}

fn linesearch_from(stepper: &Stepper<'_>, state: &ParticleState, forces: &[Point], tau0: f64) -> Result<f64> {
    let n = state.len() as f64;
    let e0 = stepper.energy(state)?;
    let mut tau = tau0;
    for _ in 0..=MAX_HALVINGS {
        // Trial steps that leave the tube or blow up count as rejections.
        if let Ok(trial) = stepper.advance(state, forces, tau) {
            let moved = state.positions.iter().zip(&trial.positions).fold(0.0, |acc, (a, b)| acc + a.dist_sq(b));
            let g_sq = moved / (tau * tau * n * n);
            let e1 = stepper.energy(&trial)?;
            let rounding = 4.0 * f64::EPSILON * e0.abs();
            if e1 <= e0 - ARMIJO_C * tau * n * g_sq + rounding {
                return Ok(tau);
            }
        }
        tau *= 0.5;
    }
    Err(Error::LinesearchFailed { halvings: MAX_HALVINGS })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    pub time: f64,
    pub energy: f64,
    pub grad_norm: f64,
    pub mean_sq_dist: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub positions: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Converged,
    MaxSteps,
    FixedTimeReached,
    Failed { step: usize, error: Error },
}

impl Termination {
    pub fn is_success(&self) -> bool {
        matches!(self, Termination::Converged | Termination::FixedTimeReached)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxSteps => "max_steps",
            Termination::FixedTimeReached => "fixed_time_reached",
            Termination::Failed { .. } => "failed",
        }
    }

    /// Label plus the error for failed runs.
    pub fn describe(&self) -> String {
        match self {
            Termination::Failed { step, error } => format!("failed at step {step}: {error}"),
            other => other.label().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub tau: f64,
    pub records: Vec<TraceRecord>,
    pub snapshots: Vec<Snapshot>,
    pub termination: Termination,
    /// Steps whose energy rose by more than [`MONOTONE_SLACK`].
    pub energy_increases: usize,
    pub final_state: ParticleState,
}

impl Trace {
    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("a trace always holds the initial record")
    }
}

/// Runs the configured scheme from `initial` until the stopping rule fires.
///
/// Configuration problems are returned as errors; failures while stepping
/// end the run with [`Termination::Failed`] and keep the partial trace.
pub fn run(config: &SchemeConfig, domain: &Domain, w: &Potential, initial: &ParticleState) -> Result<Trace> {
    config.validate()?;
    w.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    pool.install(|| run_inner(config, domain, w, initial))
}

fn run_inner(config: &SchemeConfig, domain: &Domain, w: &Potential, initial: &ParticleState) -> Result<Trace> {
    if initial.dim() != domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), found: initial.dim() });
    }
    let stepper = Stepper { scheme: config.scheme, w, domain };
    let mut state = ParticleState { positions: initial.positions.clone(), time: 0.0, step: 0 };

    if config.scheme == Scheme::Projected {
        for p in &state.positions {
            let d = domain.distance(p)?;
            if d > ON_DOMAIN_TOL {
                return Err(Error::InvalidConfig(format!(
                    "projected scheme needs initial particles on the domain (distance {d})"
                )));
            }
        }
    }

    let mut forces = stepper.forces(&state)?;
    let tau = match config.tau {
        StepSize::Fixed(t) => t,
        StepSize::Auto => {
            let tau0 = max_stable_tau(domain, w).min(1.0);
            if gradient_norm(&forces) < config.tol {
                tau0
            } else {
                linesearch_from(&stepper, &state, &forces, tau0)?
            }
        }
    };
    if config.scheme == Scheme::Projected && tau > max_stable_tau(domain, w) {
        return Err(Error::InvalidConfig(format!(
            "tau {tau} exceeds the reach-tube bound {}",
            max_stable_tau(domain, w)
        )));
    }

    let final_step = match config.stopping {
        Stopping::FixedTime { t } => Some(((t / tau) - 1e-9).ceil().max(1.0) as usize),
        _ => None,
    };

    let mut energy = stepper.energy(&state)?;
    let mut records = vec![TraceRecord {
        step: 0,
        time: 0.0,
        energy,
        grad_norm: gradient_norm(&forces),
        mean_sq_dist: penalty_moment(&state, domain)?,
    }];
    let mut snapshots = vec![Snapshot { step: 0, time: 0.0, positions: state.positions.clone() }];
    let mut energy_increases = 0;

    let mut termination = if config.stopping == Stopping::GradNorm && records[0].grad_norm < config.tol {
        Some(Termination::Converged)
    } else {
        None
    };

    while termination.is_none() {
        let step_result = stepper.advance(&state, &forces, tau).and_then(|next| {
            let f = stepper.forces(&next)?;
            let e = stepper.energy(&next)?;
            let msd = penalty_moment(&next, domain)?;
            Ok((next, f, e, msd))
        });
        let (next, next_forces, next_energy, msd) = match step_result {
            Ok(v) => v,
            Err(error) => {
                termination = Some(Termination::Failed { step: state.step + 1, error });
                break;
            }
        };
        let record = TraceRecord {
            step: next.step,
            time: next.time,
            energy: next_energy,
            grad_norm: gradient_norm(&next_forces),
            mean_sq_dist: msd,
        };
        if next_energy > energy + MONOTONE_SLACK {
            energy_increases += 1;
        }
        let rate = (next_energy - energy).abs() / tau;
        records.push(record);
        state = next;
        forces = next_forces;
        energy = next_energy;

        termination = match config.stopping {
            Stopping::GradNorm if record.grad_norm < config.tol => Some(Termination::Converged),
            Stopping::EnergyRate if rate < config.tol => Some(Termination::Converged),
            Stopping::FixedTime { .. } if Some(state.step) == final_step => Some(Termination::FixedTimeReached),
            _ if state.step >= config.max_steps => Some(Termination::MaxSteps),
            _ => None,
        };
        if state.step.is_multiple_of(config.snapshot_every) {
            snapshots.push(Snapshot { step: state.step, time: state.time, positions: state.positions.clone() });
        }
    }

    if snapshots.last().map(|s| s.step) != Some(state.step) {
        snapshots.push(Snapshot { step: state.step, time: state.time, positions: state.positions.clone() });
    }

    Ok(Trace {
        tau,
        records,
        snapshots,
        termination: termination.expect("loop exits with a termination"),
        energy_increases,
        final_state: state,
    })
}
