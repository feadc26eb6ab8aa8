use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use reachflow::experiments::{
    self, csv, format_significant, output_paths, reproduce, sweep_eps, sweep_tau, w2_files, Figure, RunSummary,
    Scenario, SweepReport,
};
use reachflow::{Error, Result};

#[derive(Parser)]
#[command(name = "reachflow", version, about = "Interacting particles on sets of positive reach")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its trace and snapshot CSVs.
    Simulate {
        scenario: PathBuf,
        /// Directory for the output files (overrides the scenario's paths).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for force evaluation.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Penalty sweep: terminal mean squared distance against eps.
    SweepEps {
        scenario: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        eps: Vec<f64>,
        /// Also write the rows as CSV to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Step-size sweep: W2 error against a fine reference run.
    SweepTau {
        scenario: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        taus: Vec<f64>,
        #[arg(long = "ref")]
        reference: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Rerun one of the canned experiments (fig2, fig3, fig4, fig5).
    Reproduce {
        figure: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// W2 distance between the last snapshots of two snapshot files.
    W2 { a: PathBuf, b: PathBuf },
}

/// Exit codes besides 0 (success) and 1 (error).
const EXIT_NOT_CONVERGED: u8 = 2;

fn load(path: &Path, workers: Option<usize>) -> Result<Scenario> {
    let mut s = Scenario::load(path)?;
    if let Some(w) = workers {
        s.config.workers = w;
        s.validate()?;
    }
    Ok(s)
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn sweep_csv(report: &SweepReport) -> String {
    let opt = |v: Option<f64>| v.map(csv::fmt_f64).unwrap_or_default();
    let mut out = format!("{},status,metric,w2_error\n", report.parameter);
    for r in &report.rows {
        out.push_str(&format!("{},{},{},{}\n", csv::fmt_f64(r.control), r.status, opt(r.metric), opt(r.w2_error)));
    }
    out
}

fn finish_sweep(report: &SweepReport, out: Option<&Path>) -> Result<ExitCode> {
    if let Some(path) = out {
        csv::write_atomic(path, &sweep_csv(report))?;
    }
    print_json(report)?;
    Ok(ExitCode::SUCCESS)
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate { scenario, out, workers } => {
            let s = load(&scenario, workers)?;
            let run = s.run()?;
            let (trace_path, snap_path) = output_paths(&s, out.as_deref());
            experiments::write_outputs(&run.trace, &trace_path, &snap_path)?;
            print_json(&RunSummary::new(&s.name, &run.trace))?;
            match run.trace.termination {
                reachflow::Termination::Failed { error, .. } => Err(error),
                t if t.is_success() => Ok(ExitCode::SUCCESS),
                _ => Ok(ExitCode::from(EXIT_NOT_CONVERGED)),
            }
        }
        Command::SweepEps { scenario, eps, out, workers } => {
            let report = sweep_eps(&load(&scenario, workers)?, &eps)?;
            finish_sweep(&report, out.as_deref())
        }
        Command::SweepTau { scenario, taus, reference, out, workers } => {
            let report = sweep_tau(&load(&scenario, workers)?, &taus, reference)?;
            finish_sweep(&report, out.as_deref())
        }
        Command::Reproduce { figure, out, workers } => {
            let figure: Figure = figure.parse()?;
            if workers == 0 {
                return Err(Error::InvalidConfig("workers must be at least 1".into()));
            }
            let report = reproduce(figure, workers)?;
            if let Some(dir) = out.as_deref() {
                for run in &report.runs {
                    let (t, s) = output_paths(&run.scenario, Some(dir));
                    experiments::write_outputs(&run.trace, &t, &s)?;
                }
                csv::write_atomic(
                    &dir.join(format!("{figure}_summary.json")),
                    &serde_json::to_string_pretty(&report.summary)?,
                )?;
            }
            print_json(&json!({ "figure": figure.to_string(), "summary": report.summary }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::W2 { a, b } => {
            println!("{}", format_significant(w2_files(&a, &b)?));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{}", json!({ "error": err.kind(), "message": err.to_string() }));
            ExitCode::FAILURE
        }
    }
}
