//! `nesterov-ode`: batch runner for accelerated-gradient and ODE experiments.
//!
//! Exit status: 0 on success, 1 when an asserted bound fails, 2 for bad
//! usage or config, 3 when a run diverges.

mod config;
mod error;
mod output;
mod record;
mod runner;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nesterov_ode::problems::{build, dimensions};
use nesterov_ode::{ProblemName, ProblemSpec, ProxSpec, Scale, StandardObjective};

use crate::config::{AnalysisConfig, AnalysisOp, ExperimentConfig, OutputSection, ProblemSection, RunConfig, RunKind};
use crate::error::{CliError, Result};
use crate::runner::{Options, Trace};

#[derive(Debug, Parser)]
#[command(name = "nesterov-ode", version, about = "Accelerated gradient schemes and their ODE limit")]
struct Cli {
    /// Output directory for traces, analyses, the summary and the instance cache.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides the problem seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Problem scale: desk or paper.
    #[arg(long, global = true, value_parser = parse_scale)]
    scale: Option<Scale>,
    /// Omits the timestamp from summary.toml.
    #[arg(long, global = true)]
    deterministic_summary: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Runs an experiment config.
    Run { config: PathBuf },
    /// Checks the invariant suite and prints bound against measured value.
    Selftest {
        #[arg(long, hide = true)]
        inject_momentum_fault: bool,
    },
    /// Lists the named problem instances.
    ListProblems,
    /// Integrates the ODE on a named problem and writes its trace.
    TraceOde {
        problem: String,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 20.0)]
        horizon: f64,
        #[arg(long, default_value_t = 3.0)]
        r: f64,
        /// Zeroes the velocity whenever the speed starts to decrease.
        #[arg(long)]
        restart: bool,
        /// Keeps every n-th sample.
        #[arg(long, default_value_t = 1)]
        sample_every: usize,
        /// Adds x0..x{n-1} columns (n ≤ 4).
        #[arg(long)]
        x_columns: bool,
    },
    /// Reports max_k ‖x_k − X(k√s)‖ between the scheme and the ODE for shrinking s.
    Compare {
        problem: String,
        #[arg(long, default_value_t = 3.0)]
        r: f64,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        /// Step of the ODE reference when no closed form exists.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Scheme steps; defaults to 1e-2, 1e-3, 1e-4 times min(1, 1/L).
        #[arg(long, value_delimiter = ',')]
        steps: Vec<f64>,
    },
}

fn parse_scale(s: &str) -> std::result::Result<Scale, String> {
    s.parse().map_err(|e: nesterov_ode::Error| e.to_string())
}

impl Cli {
    fn options(&self) -> Options {
        Options {
            out: self.out.clone(),
            scale: self.scale,
            seed: self.seed,
            deterministic_summary: self.deterministic_summary,
            quiet: false,
        }
    }

    fn spec(&self, problem: &str) -> Result<ProblemSpec> {
        let name: ProblemName = problem.parse().map_err(|e: nesterov_ode::Error| CliError::config(e.to_string()))?;
        let mut spec = ProblemSpec::desk(name);
        spec.scale = self.scale.unwrap_or(spec.scale);
        spec.seed = self.seed.unwrap_or(spec.seed);
        Ok(spec)
    }
}

fn single_problem(problem: &str, runs: Vec<RunConfig>, analyses: Vec<AnalysisConfig>) -> ExperimentConfig {
    ExperimentConfig {
        problem: ProblemSection { name: problem.into(), scale: None, seed: None },
        runs,
        analyses,
        output: OutputSection::default(),
    }
}

/// The continuous run that fits the objective: closed form for diagonal
/// quadratics when allowed, the composite integrator for lasso-type objectives.
fn ode_kind(spec: &ProblemSpec, restart: bool, closed_form: bool) -> Result<RunKind> {
    let (obj, _) = build(spec)?;
    Ok(match (&obj.g, &obj.h) {
        (StandardObjective::Quadratic(_), ProxSpec::Zero) if closed_form && !restart => RunKind::ClosedForm,
        (_, ProxSpec::Zero) if restart => RunKind::OdeRestart,
        (_, ProxSpec::Zero) => RunKind::Ode,
        (StandardObjective::LeastSquares(_), ProxSpec::L1 { .. }) if !restart => RunKind::CompositeOde,
        _ => return Err(CliError::config(format!("{} has no ODE integrator for its penalty or restart mode", spec.name))),
    })
}

fn list_problems() {
    println!("{:<22} {:<14} {:<10} {:<16} description", "name", "suite", "desk", "paper");
    for &name in ProblemName::ALL {
        let fmt = |(r, c): (usize, usize)| if c == 0 { format!("{r}") } else { format!("{r}x{c}") };
        println!(
            "{:<22} {:<14} {:<10} {:<16} {}",
            name.as_str(),
            name.suite(),
            fmt(dimensions(name, Scale::Desk)),
            fmt(dimensions(name, Scale::Paper)),
            name.description()
        );
    }
}

fn trace_ode(cli: &Cli, problem: &str, run: RunConfig) -> Result<()> {
    let cfg = single_problem(problem, vec![run], Vec::new());
    runner::execute(&cfg, &cli.options())?.into_result().map(drop)
}

fn compare(cli: &Cli, problem: &str, r: f64, horizon: f64, dt: f64, steps: &[f64]) -> Result<()> {
    let spec = cli.spec(problem)?;
    let steps = if steps.is_empty() {
        let (obj, _) = build(&spec)?;
        let unit = (1.0 / obj.lipschitz()).min(1.0);
        vec![1e-2 * unit, 1e-3 * unit, 1e-4 * unit]
    } else {
        steps.to_vec()
    };
    let mut ode = RunConfig::ode("ode", ode_kind(&spec, false, true)?, dt, horizon);
    ode.r = Some(r);
    let mut runs = vec![ode];
    let mut analyses = Vec::new();
    for (i, s) in steps.iter().enumerate() {
        let id = format!("s{i}");
        let mut run = RunConfig::scheme(&id, RunKind::Nesterov, (horizon / s.sqrt()).floor() as usize);
        run.step = Some(*s);
        run.r = Some(r);
        runs.push(run);
        analyses.push(AnalysisConfig::new(format!("deviation-{id}"), AnalysisOp::Deviation, vec![id, "ode".into()]));
    }
    let cfg = single_problem(problem, runs, analyses);
    let mut opts = cli.options();
    opts.quiet = true;
    let report = runner::execute(&cfg, &opts)?.into_result()?;
    let devs: Vec<f64> = report.summary.analysis.iter().map(|a| a.measured.unwrap_or(f64::NAN)).collect();
    println!("{problem}: max_k ‖x_k − X(k√s)‖ over t ≤ {horizon}, r = {r}");
    println!("{:>12}  {:>14}  {:>10}", "s", "deviation", "ratio");
    for (i, (s, d)) in steps.iter().zip(&devs).enumerate() {
        let ratio = if i == 0 { String::from("-") } else { format!("{:.4}", d / devs[i - 1]) };
        println!("{s:>12.3e}  {d:>14.6e}  {ratio:>10}");
    }
    output::write_series_csv(&report.out.join("compare.csv"), ["s", "deviation"], &steps, &devs)?;
    if let Some(Trace::Continuous(t)) = report.traces.get("ode") {
        println!("ODE reference: {} samples to t = {}", t.len(), t.horizon());
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::from_path(config)?;
            runner::execute(&cfg, &cli.options())?.into_result().map(drop)
        }
        Command::Selftest { inject_momentum_fault } => match selftest::report(*inject_momentum_fault) {
            0 => Ok(()),
            n => Err(CliError::Assertion(n)),
        },
        Command::ListProblems => {
            list_problems();
            Ok(())
        }
        Command::TraceOde { problem, dt, horizon, r, restart, sample_every, x_columns } => {
            let spec = cli.spec(problem)?;
            let mut run = RunConfig::ode(format!("{problem}-ode"), ode_kind(&spec, *restart, false)?, *dt, *horizon);
            run.r = Some(*r);
            run.sample_every = Some(*sample_every);
            run.x_columns = *x_columns;
            trace_ode(cli, problem, run)
        }
        Command::Compare { problem, r, horizon, dt, steps } => compare(cli, problem, *r, *horizon, *dt, steps),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
