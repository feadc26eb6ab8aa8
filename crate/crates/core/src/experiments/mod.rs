//! Scenario files, convergence sweeps, canned figure reproductions and the
//! file-level helpers used by the command-line tool.

pub mod csv;
mod figures;
pub mod stats;

pub use figures::{figure_scenarios, reproduce, Figure, FigureReport, FigureRun};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{run, sample_initial, InitialSpec, Scheme, SchemeConfig, StepSize, Stopping, Trace};
use crate::energy::{penalty_moment, ParticleState};
use crate::error::{Error, Result};
use crate::geometry::{Domain, DomainSpec};
use crate::potential::Potential;
use crate::wasserstein::w2_assignment;

pub const SCENARIO_VERSION: u32 = 1;

/// Errors below this level are treated as exact agreement when estimating
/// convergence orders.
pub const ORDER_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<PathBuf>,
}

/// A complete, self-describing simulation input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub name: String,
    pub domain: DomainSpec,
    pub potential: Potential,
    pub config: SchemeConfig,
    pub initial: InitialSpec,
    #[serde(default)]
    pub outputs: Outputs,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Scenario::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenarios always serialise")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SCENARIO_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported scenario version {} (expected {SCENARIO_VERSION})",
                self.version
            )));
        }
        if self.name.is_empty() {
            return Err(Error::InvalidConfig("scenario name must not be empty".into()));
        }
        self.domain.build()?;
        self.potential.validate()?;
        self.config.validate()
    }

    /// Builds the domain and draws the initial state from the scenario seed.
    pub fn prepare(&self) -> Result<(Domain, ParticleState)> {
        self.validate()?;
        let domain = self.domain.build()?;
        let initial = sample_initial(&self.initial, &domain, self.config.seed)?;
        Ok((domain, initial))
    }

    pub fn run(&self) -> Result<ScenarioRun> {
        let (domain, initial) = self.prepare()?;
        let trace = run(&self.config, &domain, &self.potential, &initial)?;
        Ok(ScenarioRun { domain, initial, trace })
    }
}

pub struct ScenarioRun {
    pub domain: Domain,
    pub initial: ParticleState,
    pub trace: Trace,
}

/// Machine-readable end-of-run summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub termination: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub tau: f64,
    pub steps: usize,
    pub time: f64,
    pub energy: f64,
    pub grad_norm: f64,
    pub mean_sq_dist: f64,
    pub energy_increases: usize,
}

impl RunSummary {
    pub fn new(name: &str, trace: &Trace) -> Self {
        let last = trace.last();
        RunSummary {
            name: name.to_string(),
            termination: trace.termination.label().to_string(),
            failure: match &trace.termination {
                crate::dynamics::Termination::Failed { error, .. } => Some(error.to_string()),
                _ => None,
            },
            tau: trace.tau,
            steps: last.step,
            time: last.time,
            energy: last.energy,
            grad_norm: last.grad_norm,
            mean_sq_dist: last.mean_sq_dist,
            energy_increases: trace.energy_increases,
        }
    }
}

/// Writes the trace and snapshot CSV files of a finished run.
pub fn write_outputs(trace: &Trace, trace_path: &Path, snapshot_path: &Path) -> Result<()> {
    csv::write_atomic(trace_path, &csv::trace_csv(&trace.records))?;
    csv::write_atomic(snapshot_path, &csv::snapshots_csv(&trace.snapshots))
}

/// Output locations: `dir/<name>_{trace,snapshots}.csv` when a directory is
/// given, otherwise the scenario's own paths, otherwise the same names in
/// the working directory.
pub fn output_paths(scenario: &Scenario, dir: Option<&Path>) -> (PathBuf, PathBuf) {
    let default = |suffix: &str| PathBuf::from(format!("{}_{suffix}.csv", scenario.name));
    match dir {
        Some(d) => (d.join(default("trace")), d.join(default("snapshots"))),
        None => (
            scenario.outputs.trace.clone().unwrap_or_else(|| default("trace")),
            scenario.outputs.snapshots.clone().unwrap_or_else(|| default("snapshots")),
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// The swept parameter, ε or τ.
    pub control: f64,
    pub status: String,
    /// Terminal penalty moment for ε sweeps, final energy for τ sweeps.
    pub metric: Option<f64>,
    /// `d₂` to the reference solution (τ sweeps only).
    pub w2_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `log(value)` against `log(control)`; absent when
    /// fewer than three rows carry a positive value.
    pub slope: Option<f64>,
    /// Root-mean-square residual of the fit.
    pub residual: Option<f64>,
    /// Orders between consecutive rows (τ sweeps); `None` when either error
    /// is below [`ORDER_FLOOR`] or a row failed.
    pub orders: Vec<Option<f64>>,
}

/// Least-squares line through `(ln x, ln y)`; returns slope and RMS residual.
pub fn loglog_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    Some((slope, (rss / n).sqrt()))
}

fn sorted_distinct_descending(values: &[f64], name: &str) -> Result<Vec<f64>> {
    if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidSweep(format!("{name} values must be positive and finite")));
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    if v.len() != values.len() {
        return Err(Error::InvalidSweep(format!("{name} values must be distinct")));
    }
    if v.len() < 3 {
        return Err(Error::InvalidSweep(format!("a slope fit needs at least 3 {name} values")));
    }
    Ok(v)
}

/// Runs the penalised scheme to gradient-norm convergence for each ε and
/// fits the decay of the terminal penalty moment `(1/N) Σ d²`.
pub fn sweep_eps(base: &Scenario, eps: &[f64]) -> Result<SweepReport> {
    if !matches!(base.config.scheme, Scheme::EpsilonFlow { .. }) {
        return Err(Error::InvalidSweep("an eps sweep needs the epsilon_flow scheme".into()));
    }
    let eps = sorted_distinct_descending(eps, "eps")?;
    let (domain, initial) = base.prepare()?;
    let rows: Vec<SweepRow> = eps
        .iter()
        .map(|&e| {
            let config = SchemeConfig {
                scheme: Scheme::EpsilonFlow { eps: e },
                stopping: Stopping::GradNorm,
                ..base.config.clone()
            };
            let outcome = run(&config, &domain, &base.potential, &initial).and_then(|trace| {
                let m = penalty_moment(&trace.final_state, &domain)?;
                Ok((trace, m))
            });
            match outcome {
                Ok((trace, m)) => SweepRow {
                    control: e,
                    status: trace.termination.describe(),
                    metric: trace.termination.is_success().then_some(m),
                    w2_error: None,
                },
                Err(err) => SweepRow { control: e, status: format!("failed: {err}"), metric: None, w2_error: None },
            }
        })
        .collect();
    let fit = loglog_fit(&rows.iter().filter_map(|r| r.metric.map(|m| (r.control, m))).collect::<Vec<_>>());
    Ok(SweepReport {
        parameter: "eps".into(),
        rows,
        slope: fit.map(|f| f.0),
        residual: fit.map(|f| f.1),
        orders: Vec::new(),
    })
}

/// Observed order between two errors at steps `tau_a > tau_b`.
pub fn observed_order(e_a: f64, e_b: f64, tau_a: f64, tau_b: f64) -> Option<f64> {
    if e_a < ORDER_FLOOR || e_b < ORDER_FLOOR {
        None
    } else {
        Some((e_a / e_b).ln() / (tau_a / tau_b).ln())
    }
}

/// Runs the projected scheme to a fixed final time for each τ and for a much
/// finer reference step, all from the same initial state, and reports the
/// `d₂` errors and observed orders.
pub fn sweep_tau(base: &Scenario, taus: &[f64], reference: f64) -> Result<SweepReport> {
    if base.config.scheme != Scheme::Projected {
        return Err(Error::InvalidSweep("a tau sweep needs the projected scheme".into()));
    }
    if !matches!(base.config.stopping, Stopping::FixedTime { .. }) {
        return Err(Error::InvalidSweep("a tau sweep needs a fixed final time".into()));
    }
    let taus = sorted_distinct_descending(taus, "tau")?;
    if !(reference > 0.0 && reference.is_finite()) || taus.contains(&reference) {
        return Err(Error::InvalidSweep("the reference tau must be positive and not in the list".into()));
    }
    let finest = *taus.last().expect("at least three values");
    if reference > finest / 8.0 {
        return Err(Error::InvalidSweep(format!(
            "the reference tau {reference} must be at most {} (an eighth of the smallest tau)",
            finest / 8.0
        )));
    }
    let (domain, initial) = base.prepare()?;
    let solve = |tau: f64| -> Result<Trace> {
        let config = SchemeConfig { tau: StepSize::Fixed(tau), ..base.config.clone() };
        run(&config, &domain, &base.potential, &initial)
    };
    let reference_trace = solve(reference)?;
    if !reference_trace.termination.is_success() {
        return Err(Error::InvalidSweep(format!("reference run ended with {}", reference_trace.termination.label())));
    }
    let target = &reference_trace.final_state.positions;
    let rows: Vec<SweepRow> = taus
        .iter()
        .map(|&tau| {
            let outcome = solve(tau).and_then(|trace| {
                let e = w2_assignment(&trace.final_state.positions, target)?;
                Ok((trace, e))
            });
            match outcome {
                Ok((trace, e)) if trace.termination.is_success() => SweepRow {
                    control: tau,
                    status: trace.termination.describe(),
                    metric: Some(trace.last().energy),
                    w2_error: Some(e),
                },
                Ok((trace, _)) => {
                    SweepRow { control: tau, status: trace.termination.describe(), metric: None, w2_error: None }
                }
                Err(err) => SweepRow { control: tau, status: format!("failed: {err}"), metric: None, w2_error: None },
            }
        })
        .collect();
    let orders = rows
        .windows(2)
        .map(|w| match (w[0].w2_error, w[1].w2_error) {
            (Some(a), Some(b)) => observed_order(a, b, w[0].control, w[1].control),
            _ => None,
        })
        .collect();
    let fit = loglog_fit(&rows.iter().filter_map(|r| r.w2_error.map(|e| (r.control, e))).collect::<Vec<_>>());
    Ok(SweepReport { parameter: "tau".into(), rows, slope: fit.map(|f| f.0), residual: fit.map(|f| f.1), orders })
}

/// `d₂` between the last snapshots stored in two snapshot files.
pub fn w2_files(a: &Path, b: &Path) -> Result<f64> {
    let last = |p: &Path| -> Result<Vec<crate::point::Point>> {
        Ok(csv::read_snapshots(p)?.pop().expect("parser rejects empty files").1)
    };
    w2_assignment(&last(a)?, &last(b)?)
}

/// Twelve significant digits, e.g. `0.500000000000`.
pub fn format_significant(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0.000000000000".into() } else { format!("{v}") };
    }
    let decimals = (11 - v.abs().log10().floor() as i64).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // Rounding can carry into a new leading digit (9.99... -> 10.0...).
    let digits = s.chars().filter(char::is_ascii_digit).skip_while(|c| *c == '0').count();
    if digits > 12 && decimals > 0 {
        format!("{v:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}
