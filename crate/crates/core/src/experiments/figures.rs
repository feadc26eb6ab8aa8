//! Canned scenarios for the four numerical experiments and their summaries.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::stats::{angular_gap_discrepancy, clusters, Cluster};
use super::{Outputs, Scenario, SCENARIO_VERSION};
use crate::dynamics::{InitialSpec, Scheme, SchemeConfig, StepSize, Stopping, Trace};
use crate::energy::{interaction_energy, interaction_energy_without_self, ParticleState};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, BEAN_BOUNDARY_REACH, BEAN_INTERIOR_REACH};
use crate::point::Point;
use crate::potential::Potential;

/// Vertices of the polygonal bean used by the bean experiments.
pub const BEAN_VERTICES: usize = 1024;
/// Linkage radius for counting particle clusters on the line and the curve.
pub const CLUSTER_RADIUS: f64 = 0.05;
/// Linkage radius for counting collapsed point masses in the solid bean.
pub const MASS_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Interval plus isolated point, penalised flow, attraction.
    Fig2,
    /// Unit disc, projected flow, two repulsive kernels.
    Fig3,
    /// Solid bean, projected flow, repulsion, two seeds.
    Fig4,
    /// Bean boundary curve, projected flow, attraction.
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5];
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            "fig5" => Ok(Figure::Fig5),
            other => Err(Error::UnknownFigure(other.to_string())),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        })
    }
}

fn scenario(
    name: &str,
    domain: DomainSpec,
    potential: Potential,
    config: SchemeConfig,
    initial: InitialSpec,
) -> Scenario {
    Scenario {
        version: SCENARIO_VERSION,
        name: name.into(),
        domain,
        potential,
        config,
        initial,
        outputs: Outputs::default(),
    }
}

/// 14 x 14 perturbed grid spanning `[x0, x1] x [-0.45, 0.45]`, projected
/// onto the bean.
fn bean_grid(x0: f64, x1: f64) -> InitialSpec {
    InitialSpec::ProjectedPerturbedGrid {
        lower: vec![x0, -0.45],
        upper: vec![x1, 0.45],
        counts: vec![14, 14],
        jitter: 0.02,
    }
}

/// The scenarios run by [`reproduce`], with the shipped seeds.
pub fn figure_scenarios(figure: Figure) -> Vec<Scenario> {
    let origin = Point::new2(0.0, 0.0);
    match figure {
        Figure::Fig2 => vec![scenario(
            "fig2",
            DomainSpec::IntervalUnion { intervals: vec![[-1.0, 1.0], [1.5, 1.5]] },
            Potential::Quadratic,
            SchemeConfig {
                scheme: Scheme::EpsilonFlow { eps: 0.1 },
                tau: StepSize::Auto,
                tol: 1e-9,
                stopping: Stopping::GradNorm,
                max_steps: 1_000_000,
                snapshot_every: 50,
                seed: 7,
                workers: 1,
            },
            InitialSpec::UniformBox { lower: vec![-1.75], upper: vec![1.75], n: 100 },
        )],
        Figure::Fig3 => [(10.0, "fig3_scale10"), (1.0, "fig3_scale1")]
            .into_iter()
            .map(|(scale, name)| {
                scenario(
                    name,
                    DomainSpec::Disc { center: origin, radius: 1.0 },
                    Potential::InverseQuadratic { sign: 1.0, scale },
                    SchemeConfig {
                        scheme: Scheme::Projected,
                        tau: StepSize::Auto,
                        tol: 1e-9,
                        stopping: Stopping::FixedTime { t: 200.0 },
                        max_steps: 10_000_000,
                        snapshot_every: 1000,
                        seed: 5,
                        workers: 1,
                    },
                    InitialSpec::PerturbedGrid {
                        lower: vec![-0.65, -0.65],
                        upper: vec![0.65, 0.65],
                        counts: vec![14, 14],
                        jitter: 0.025,
                        inside_only: true,
                    },
                )
            })
            .collect(),
        // The two runs start from distinct grids: one spanning the whole bean
        // and one covering only the left lobe. The narrow waist keeps the
        // uneven split of the second, which settles in a different local
        // minimiser.
        Figure::Fig4 => [(11u64, 1.0), (13, 0.0)]
            .into_iter()
            .map(|(seed, x1)| {
                scenario(
                    &format!("fig4_seed{seed}"),
                    DomainSpec::BeanInterior { n: BEAN_VERTICES, reach: BEAN_INTERIOR_REACH },
                    Potential::InverseQuadratic { sign: 1.0, scale: 1.0 },
                    SchemeConfig {
                        scheme: Scheme::Projected,
                        tau: StepSize::Auto,
                        tol: 2e-10,
                        stopping: Stopping::EnergyRate,
                        max_steps: 5_000_000,
                        snapshot_every: 5000,
                        seed,
                        workers: 1,
                    },
                    bean_grid(-1.0, x1),
                )
            })
            .collect(),
        Figure::Fig5 => vec![scenario(
            "fig5",
            DomainSpec::BeanBoundary { n: BEAN_VERTICES, reach: BEAN_BOUNDARY_REACH },
            Potential::InverseQuadratic { sign: -1.0, scale: 1.0 },
            SchemeConfig {
                scheme: Scheme::Projected,
                tau: StepSize::Auto,
                tol: 1e-9,
                stopping: Stopping::FixedTime { t: 28.0 },
                max_steps: 1_000_000,
                snapshot_every: 100,
                seed: 13,
                workers: 1,
            },
            bean_grid(-1.0, 1.0),
        )],
    }
}

pub struct FigureRun {
    pub scenario: Scenario,
    pub trace: Trace,
}

pub struct FigureReport {
    pub figure: Figure,
    pub runs: Vec<FigureRun>,
    /// Figure-specific summary, ready to print as JSON.
    pub summary: serde_json::Value,
}

#[derive(Serialize)]
struct RunHeader {
    name: String,
    seed: u64,
    termination: String,
    tau: f64,
    steps: usize,
    time: f64,
    energy_increases: usize,
}

impl RunHeader {
    fn new(run: &FigureRun) -> Self {
        let last = run.trace.last();
        RunHeader {
            name: run.scenario.name.clone(),
            seed: run.scenario.config.seed,
            termination: run.trace.termination.label().into(),
            tau: run.trace.tau,
            steps: last.step,
            time: last.time,
            energy_increases: run.trace.energy_increases,
        }
    }
}

#[derive(Serialize)]
struct Fig2Summary {
    run: RunHeader,
    penalty_moment: f64,
    min: f64,
    max: f64,
    clusters: Vec<Cluster>,
}

#[derive(Serialize)]
struct Fig3Row {
    run: RunHeader,
    scale: f64,
    energy: f64,
    boundary_particles: usize,
    interior_particles: usize,
    angular_gap_discrepancy: f64,
}

#[derive(Serialize)]
struct Fig4Row {
    run: RunHeader,
    energy_with_self: f64,
    energy_without_self: f64,
    point_masses: usize,
    largest_mass: usize,
}

#[derive(Serialize)]
struct ClusterCount {
    time: f64,
    clusters: usize,
}

#[derive(Serialize)]
struct Fig5Summary {
    run: RunHeader,
    cluster_counts: Vec<ClusterCount>,
    final_clusters: Vec<Cluster>,
}

fn final_state(run: &FigureRun) -> &ParticleState {
    &run.trace.final_state
}

fn summarise(figure: Figure, runs: &[FigureRun]) -> Result<serde_json::Value> {
    let value = match figure {
        Figure::Fig2 => {
            let run = &runs[0];
            let pts = &final_state(run).positions;
            let xs = pts.iter().map(Point::x);
            serde_json::to_value(Fig2Summary {
                run: RunHeader::new(run),
                penalty_moment: run.trace.last().mean_sq_dist,
                min: xs.clone().fold(f64::INFINITY, f64::min),
                max: xs.fold(f64::NEG_INFINITY, f64::max),
                clusters: clusters(pts, CLUSTER_RADIUS),
            })?
        }
        Figure::Fig3 => {
            let rows = runs
                .iter()
                .map(|run| {
                    let pts = &final_state(run).positions;
                    let boundary: Vec<Point> = pts.iter().copied().filter(|p| p.norm() >= 1.0 - 1e-9).collect();
                    let scale = match run.scenario.potential {
                        Potential::InverseQuadratic { scale, .. } => scale,
                        Potential::Quadratic => 0.0,
                    };
                    Fig3Row {
                        run: RunHeader::new(run),
                        scale,
                        energy: run.trace.last().energy,
                        boundary_particles: boundary.len(),
                        interior_particles: pts.len() - boundary.len(),
                        angular_gap_discrepancy: angular_gap_discrepancy(&boundary, Point::new2(0.0, 0.0)),
                    }
                })
                .collect::<Vec<_>>();
            serde_json::to_value(rows)?
        }
        Figure::Fig4 => {
            let rows = runs
                .iter()
                .map(|run| {
                    let state = final_state(run);
                    let masses = clusters(&state.positions, MASS_RADIUS);
                    Fig4Row {
                        run: RunHeader::new(run),
                        energy_with_self: interaction_energy(state, &run.scenario.potential),
                        energy_without_self: interaction_energy_without_self(state, &run.scenario.potential),
                        point_masses: masses.len(),
                        largest_mass: masses.iter().map(|c| c.count).max().unwrap_or(0),
                    }
                })
                .collect::<Vec<_>>();
            serde_json::to_value(rows)?
        }
        Figure::Fig5 => {
            let run = &runs[0];
            serde_json::to_value(Fig5Summary {
                run: RunHeader::new(run),
                cluster_counts: run
                    .trace
                    .snapshots
                    .iter()
                    .map(|s| ClusterCount { time: s.time, clusters: clusters(&s.positions, CLUSTER_RADIUS).len() })
                    .collect(),
                final_clusters: clusters(&final_state(run).positions, CLUSTER_RADIUS),
            })?
        }
    };
    Ok(value)
}

/// Runs every scenario of a figure with `workers` threads and summarises
/// the final states.
pub fn reproduce(figure: Figure, workers: usize) -> Result<FigureReport> {
    let runs = figure_scenarios(figure)
        .into_iter()
        .map(|mut scenario| {
            scenario.config.workers = workers;
            let trace = scenario.run()?.trace;
            Ok(FigureRun { scenario, trace })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarise(figure, &runs)?;
    Ok(FigureReport { figure, runs, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_names() {
        for f in Figure::ALL {
            assert_eq!(f.to_string().parse::<Figure>().unwrap(), f);
        }
        assert_eq!("fig9".parse::<Figure>().unwrap_err(), Error::UnknownFigure("fig9".into()));
    }

    #[test]
    fn catalog_validates() {
        for f in Figure::ALL {
            for s in figure_scenarios(f) {
                s.validate().unwrap();
                let (domain, initial) = s.prepare().unwrap();
                if s.config.scheme == Scheme::Projected {
                    for p in &initial.positions {
                        assert!(domain.distance(p).unwrap() <= 1e-9, "{}", s.name);
                    }
                }
            }
        }
        assert_eq!(figure_scenarios(Figure::Fig3)[0].prepare().unwrap().1.len(), 196);
        assert_eq!(figure_scenarios(Figure::Fig4)[0].prepare().unwrap().1.len(), 196);
    }
}
