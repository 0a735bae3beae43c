//! Executes a validated config: instance, runs, analyses, artifacts.
//!
//! Layout under the output directory:
//!
//! * `runs/<id>.csv`: one trace per run.
//! * `analyses/<id>.csv`: the `(grid, value)` series behind an analysis.
//! * `summary.toml`: problem, run and analysis records.
//! * `instances/`: the write-once instance cache.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use nesterov_ode::analysis::{
    energy_continuous, energy_discrete, linear_rate_fit, mean_spacing, oscillation_roots, scaled_error_continuous,
    scaled_error_discrete, scheme_ode_deviation, velocity_ratio_max, EnergyVariant,
};
use nesterov_ode::ode::{closed_form_trace, integrate, integrate_composite_lasso, Stepping};
use nesterov_ode::schemes::{run_kind, SchemeKind};
use nesterov_ode::{
    ContinuousTrace, Error, IterateTrace, OdeParams, ProblemInstance, ProxSpec, Scale, SchemeParams, Smooth,
    StandardObjective,
};

use crate::config::{AnalysisConfig, AnalysisOp, EnergyName, ExperimentConfig, RunConfig, RunKind, SteppingName};
use crate::error::{CliError, Result};
use crate::output::{
    self, write_continuous_csv, write_iterate_csv, write_series_csv, AnalysisSummary, ProblemSummary, RunSummary,
    Summary,
};
use crate::record;

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub scale: Option<Scale>,
    pub seed: Option<u64>,
    pub deterministic_summary: bool,
    /// Suppresses the stdout report.
    pub quiet: bool,
}

#[derive(Debug)]
pub enum Trace {
    Discrete(IterateTrace),
    Continuous(ContinuousTrace),
}

impl Trace {
    fn final_gap(&self) -> Option<f64> {
        match self {
            Trace::Discrete(t) => t.records.last().map(|r| r.f_gap),
            Trace::Continuous(t) => t.f_gap.last().copied(),
        }
    }
}

#[derive(Debug)]
pub struct Report {
    pub out: PathBuf,
    pub summary: Summary,
    pub traces: HashMap<String, Trace>,
    pub diverged: Option<CliError>,
    pub failures: usize,
}

impl Report {
    /// Divergence first, then failed assertions.
    pub fn into_result(self) -> Result<Self> {
        if let Some(e) = self.diverged {
            return Err(e);
        }
        if self.failures > 0 {
            return Err(CliError::Assertion(self.failures));
        }
        Ok(self)
    }
}

fn needs_iterates(cfg: &ExperimentConfig, run: &str) -> bool {
    cfg.analyses.iter().any(|a| {
        let ids = a.run_ids();
        match a.op {
            AnalysisOp::Deviation => ids.first() == Some(&run),
            AnalysisOp::Energy => ids.contains(&run),
            _ => false,
        }
    })
}

/// Checks that every analysis fits the kinds of the runs it references.
fn check_analysis_kinds(cfg: &ExperimentConfig) -> Result<()> {
    let kind = |id: &str| cfg.runs.iter().find(|r| r.id == id).map(|r| r.kind).expect("validated");
    for a in &cfg.analyses {
        let ids = a.run_ids();
        let k = kind(ids[0]);
        let bad = |what: &str| Err(CliError::config(format!("analysis `{}` ({}): {what}", a.id, a.op.name())));
        match a.op {
            AnalysisOp::RateCertificate if k != RunKind::Nesterov => return bad("needs a nesterov run"),
            AnalysisOp::LinearRateFit if !k.is_scheme() => return bad("needs a scheme run"),
            AnalysisOp::OscillationRoots | AnalysisOp::VelocityRatio if k.is_scheme() => return bad("needs an ODE run"),
            AnalysisOp::Deviation if !k.is_scheme() || kind(ids[1]).is_scheme() => {
                return bad("needs a scheme run followed by an ODE run")
            }
            AnalysisOp::FirstRestart
                if !matches!(k, RunKind::SpeedRestart | RunKind::GradientRestart | RunKind::OdeRestart) =>
            {
                return bad("needs a restarted run")
            }
            AnalysisOp::ScaledErrorGrowth if a.window.is_none() => return bad("needs `window = [lo, hi]`"),
            AnalysisOp::Energy => {
                let discrete = matches!(a.variant, Some(EnergyName::DiscreteR | EnergyName::DiscreteT3));
                match a.variant {
                    None => return bad("needs `variant`"),
                    Some(_) if discrete && k != RunKind::Nesterov => return bad("discrete energies need a nesterov run"),
                    Some(_) if !discrete && k.is_scheme() => return bad("continuous energies need an ODE run"),
                    Some(EnergyName::Alpha) if a.alpha.is_none() => return bad("the alpha energy needs `alpha`"),
                    _ => {}
                }
            }
            _ => {}
        }
    }
    Ok(())
}

fn stepping(s: Option<SteppingName>) -> Stepping {
    match s {
        Some(SteppingName::Explicit) => Stepping::Explicit,
        Some(SteppingName::SemiImplicit) | None => Stepping::SemiImplicit,
    }
}

fn ode_params(run: &RunConfig) -> OdeParams {
    let mut p = OdeParams::new(run.dt.expect("validated"), run.horizon.expect("validated"))
        .with_r(run.r())
        .with_restart(run.kind == RunKind::OdeRestart)
        .with_stepping(stepping(run.stepping));
    if let Some(d) = run.delta {
        p = p.with_delta(d);
    }
    if let Some(e) = run.sample_every {
        p = p.with_sample_every(e);
    }
    p
}

fn execute_run(inst: &ProblemInstance, run: &RunConfig, keep_iterates: bool) -> std::result::Result<Trace, Error> {
    let obj = &inst.objective;
    let unsupported = |what: &str| Err(Error::InvalidArgument(format!("run `{}`: {what}", run.id)));
    if run.kind.is_scheme() {
        let kind = match run.kind {
            RunKind::Nesterov => SchemeKind::Nesterov,
            RunKind::GradientDescent => SchemeKind::GradientDescent,
            RunKind::SpeedRestart => SchemeKind::SpeedRestart,
            _ => SchemeKind::GradientRestart,
        };
        let mut p = SchemeParams::new(run.step.unwrap_or_else(|| inst.unit_step()), run.k_max.expect("validated"))
            .with_r(run.r())
            .allow_large_step(run.allow_large_step)
            .keep_iterates(keep_iterates);
        if let Some(k) = run.k_min {
            p = p.with_k_min(k);
        }
        return run_kind(kind, obj, &inst.x0, &p, inst.optimum()).map(Trace::Discrete);
    }
    let params = ode_params(run);
    match run.kind {
        RunKind::Ode | RunKind::OdeRestart => {
            if obj.h != ProxSpec::Zero {
                return unsupported("the smooth ODE needs an objective without a nonsmooth part (use composite-ode)");
            }
            integrate(&obj.g, &inst.x0, &params, inst.optimum()).map(Trace::Continuous)
        }
        RunKind::CompositeOde => {
            let lambda = match obj.h {
                ProxSpec::L1 { lambda } => lambda,
                ProxSpec::Zero => 0.0,
                _ => return unsupported("composite-ode needs an l1 penalty"),
            };
            match &obj.g {
                StandardObjective::LeastSquares(ls) if ls.scale() == 0.5 => {
                    integrate_composite_lasso(ls.design(), ls.response(), lambda, &inst.x0, &params, inst.f_star)
                        .map(Trace::Continuous)
                }
                _ => unsupported("composite-ode needs a ½‖Ax − y‖² smooth part"),
            }
        }
        RunKind::ClosedForm => match (&obj.g, &obj.h) {
            (StandardObjective::Quadratic(q), ProxSpec::Zero) => {
                closed_form_trace(q, &inst.x0, run.r(), params.dt, params.horizon).map(Trace::Continuous)
            }
            _ => unsupported("closed-form needs a diagonal quadratic"),
        },
        _ => unreachable!("scheme kinds handled above"),
    }
}

fn discrete(t: &Trace) -> &IterateTrace {
    match t {
        Trace::Discrete(d) => d,
        Trace::Continuous(_) => unreachable!("kinds checked"),
    }
}

fn continuous(t: &Trace) -> &ContinuousTrace {
    match t {
        Trace::Continuous(c) => c,
        Trace::Discrete(_) => unreachable!("kinds checked"),
    }
}

struct Evaluated {
    measured: Option<f64>,
    series: Option<([&'static str; 2], Vec<f64>, Vec<f64>)>,
    detail: Option<String>,
}

impl Evaluated {
    fn value(v: f64) -> Self {
        Evaluated { measured: Some(v), series: None, detail: None }
    }
}

fn window_max(grid: &[f64], values: &[f64], lo: f64, hi: f64) -> f64 {
    grid.iter().zip(values).filter(|(g, _)| **g >= lo && **g <= hi).map(|(_, v)| *v).fold(0.0, f64::max)
}

fn scaled_series(trace: &Trace, power: f64) -> std::result::Result<(Vec<f64>, Vec<f64>), Error> {
    Ok(match trace {
        Trace::Discrete(t) => {
            let rs = t.params.step.sqrt();
            (t.records.iter().map(|r| r.k as f64 * rs).collect(), scaled_error_discrete(t, power)?)
        }
        Trace::Continuous(t) => (t.times.clone(), scaled_error_continuous(t, power)?),
    })
}

fn evaluate(
    a: &AnalysisConfig,
    cfg: &ExperimentConfig,
    inst: &ProblemInstance,
    traces: &HashMap<String, Trace>,
) -> std::result::Result<Evaluated, Error> {
    let ids = a.run_ids();
    let trace = &traces[ids[0]];
    let run = cfg.runs.iter().find(|r| r.id == ids[0]).expect("validated");
    let r = run.r();
    Ok(match a.op {
        AnalysisOp::ScaledError => {
            let (grid, values) = scaled_series(trace, a.power.unwrap_or(2.0))?;
            let [lo, hi] = a.window.unwrap_or([f64::NEG_INFINITY, f64::INFINITY]);
            let measured = window_max(&grid, &values, lo, hi);
            Evaluated { measured: Some(measured), series: Some((["t", "scaled_error"], grid, values)), detail: None }
        }
        AnalysisOp::ScaledErrorGrowth => {
            let (grid, values) = scaled_series(trace, a.power.unwrap_or(2.0))?;
            let [lo, hi] = a.window.expect("kinds checked");
            if !(lo > 0.0 && hi >= 10.0 * lo) {
                return Err(Error::InvalidArgument(String::from("growth window needs 0 < 10·lo ≤ hi")));
            }
            let early = window_max(&grid, &values, lo, 10.0 * lo);
            let late = window_max(&grid, &values, hi / 10.0, hi);
            Evaluated {
                measured: Some(late / early),
                series: Some((["t", "scaled_error"], grid, values)),
                detail: Some(format!("max on [{lo}, {}] = {early:e}, on [{}, {hi}] = {late:e}", 10.0 * lo, hi / 10.0)),
            }
        }
        AnalysisOp::RateCertificate => {
            let t = discrete(trace);
            let s = t.params.step;
            let d0 = inst.initial_distance_sq();
            let mut grid = Vec::new();
            let mut ratios = Vec::new();
            for rec in &t.records[1..] {
                let k = rec.k as f64;
                let bound = (r - 1.0) * (r - 1.0) * d0 / (2.0 * s * (k + r - 2.0) * (k + r - 2.0));
                grid.push(k);
                ratios.push(if rec.f_gap <= 0.0 { 0.0 } else { rec.f_gap / bound });
            }
            let worst = ratios.iter().copied().fold(0.0, f64::max);
            Evaluated { measured: Some(worst), series: Some((["k", "gap_over_bound"], grid, ratios)), detail: None }
        }
        AnalysisOp::Energy => {
            let variant = match a.variant.expect("kinds checked") {
                EnergyName::R3 => EnergyVariant::ContinuousR3,
                EnergyName::R => EnergyVariant::ContinuousR { r },
                EnergyName::Alpha => EnergyVariant::ContinuousAlpha {
                    r,
                    alpha: a.alpha.expect("kinds checked"),
                    mu: a.mu.unwrap_or_else(|| inst.objective.g.strong_convexity()),
                },
                EnergyName::DiscreteR => EnergyVariant::DiscreteR { r },
                EnergyName::DiscreteT3 => EnergyVariant::DiscreteT3 { r },
            };
            let e = match trace {
                Trace::Discrete(t) => energy_discrete(t, &inst.x_star, variant)?,
                Trace::Continuous(t) => energy_continuous(t, &inst.x_star, variant)?,
            };
            let e0 = e.first().abs();
            let rel = if e0 > 0.0 { e.max_increase() / e0 } else { e.max_increase() };
            Evaluated {
                measured: Some(rel),
                detail: e.warning.map(String::from),
                series: Some((["grid", "energy"], e.grid, e.values)),
            }
        }
        AnalysisOp::OscillationRoots => {
            let coord = a.coord.unwrap_or(0);
            let x_star = *inst.x_star.get(coord).ok_or_else(|| Error::InvalidArgument(String::from("coordinate out of range")))?;
            let roots = oscillation_roots(continuous(trace), coord, x_star)?;
            let index: Vec<f64> = (0..roots.len()).map(|i| i as f64).collect();
            Evaluated {
                measured: mean_spacing(&roots),
                detail: Some(format!("{} roots", roots.len())),
                series: Some((["index", "root"], index, roots)),
            }
        }
        AnalysisOp::VelocityRatio => {
            let c = continuous(trace);
            Evaluated::value(velocity_ratio_max(c, a.t_end.unwrap_or_else(|| c.horizon()))?)
        }
        AnalysisOp::Deviation => {
            let t = discrete(trace);
            Evaluated::value(scheme_ode_deviation(t, continuous(&traces[ids[1]]), t.params.step)?)
        }
        AnalysisOp::LinearRateFit => {
            let t = discrete(trace);
            let [lo, hi] = a.window.unwrap_or([1.0, (t.len() - 1) as f64]);
            if !(lo >= 0.0 && hi >= 0.0 && lo.fract() == 0.0 && hi.fract() == 0.0) {
                return Err(Error::InvalidArgument(String::from("rate-fit window needs integer iteration bounds")));
            }
            let fit = linear_rate_fit(t, (lo as usize, hi as usize))?;
            Evaluated {
                measured: Some(fit.slope),
                series: None,
                detail: Some(format!("intercept {:e}, r² {:.6}", fit.intercept, fit.r_squared)),
            }
        }
        AnalysisOp::FirstRestart => match trace {
            Trace::Discrete(t) => {
                let first = t.restart_indices().first().map(|k| *k as f64 * t.params.step.sqrt());
                Evaluated { measured: first, series: None, detail: Some(format!("{} restarts", t.restart_indices().len())) }
            }
            Trace::Continuous(c) => Evaluated {
                measured: c.restart_times.first().copied(),
                series: None,
                detail: Some(format!("{} restarts", c.restart_times.len())),
            },
        },
        AnalysisOp::FinalGap => Evaluated::value(trace.final_gap().unwrap_or(f64::NAN)),
    })
}

fn restarts(trace: &Trace) -> usize {
    match trace {
        Trace::Discrete(t) => t.restart_indices().len(),
        Trace::Continuous(t) => t.restart_times.len(),
    }
}

fn relative(out: &Path, path: &Path) -> String {
    path.strip_prefix(out).unwrap_or(path).display().to_string()
}

/// Runs `cfg`, writing artifacts under the output directory.
///
/// Diverged runs and failed assertions are reported in the returned
/// [`Report`]; errors are reserved for bad input and IO.
pub fn execute(cfg: &ExperimentConfig, opts: &Options) -> Result<Report> {
    cfg.validate()?;
    check_analysis_kinds(cfg)?;
    let spec = cfg.spec(opts.scale, opts.seed)?;
    let out = opts.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let (inst, cached) = record::load_or_generate(&out.join("instances"), &spec)?;

    let mut traces = HashMap::new();
    let mut runs = Vec::new();
    let mut diverged = None;
    for run in &cfg.runs {
        let mut summary = RunSummary {
            id: run.id.clone(),
            kind: run.kind.name().into(),
            status: "ok".into(),
            csv: None,
            samples: None,
            step: None,
            final_gap: None,
            restarts: None,
            error: None,
        };
        match execute_run(&inst, run, needs_iterates(cfg, &run.id)) {
            Ok(trace) => {
                let path = out.join("runs").join(format!("{}.csv", run.id));
                match &trace {
                    Trace::Discrete(t) => {
                        write_iterate_csv(&path, t)?;
                        summary.samples = Some(t.len());
                        summary.step = Some(t.params.step);
                    }
                    Trace::Continuous(t) => {
                        write_continuous_csv(&path, t, run.x_columns)?;
                        summary.samples = Some(t.len());
                    }
                }
                summary.csv = Some(relative(&out, &path));
                summary.final_gap = trace.final_gap();
                summary.restarts = Some(restarts(&trace));
                traces.insert(run.id.clone(), trace);
            }
            Err(e @ (Error::Divergence { .. } | Error::OdeDivergence { .. })) => {
                summary.status = "diverged".into();
                summary.error = Some(e.to_string());
                diverged.get_or_insert(CliError::Divergence { run: run.id.clone(), source: e });
            }
            Err(e) => return Err(CliError::config(e.to_string())),
        }
        runs.push(summary);
    }

    let mut analyses = Vec::new();
    let mut failures = 0;
    for a in &cfg.analyses {
        let ids = a.run_ids();
        let mut summary = AnalysisSummary {
            id: a.id.clone(),
            op: a.op.name().into(),
            runs: ids.iter().map(|s| s.to_string()).collect(),
            measured: None,
            max: a.max,
            min: a.min,
            pass: None,
            csv: None,
            detail: None,
        };
        if let Some(missing) = ids.iter().find(|id| !traces.contains_key(**id)) {
            summary.detail = Some(format!("skipped: run `{missing}` diverged"));
            analyses.push(summary);
            continue;
        }
        let ev = evaluate(a, cfg, &inst, &traces).map_err(|e| CliError::config(format!("analysis `{}`: {e}", a.id)))?;
        if let Some((header, grid, values)) = &ev.series {
            let path = out.join("analyses").join(format!("{}.csv", a.id));
            write_series_csv(&path, *header, grid, values)?;
            summary.csv = Some(relative(&out, &path));
        }
        if a.max.is_some() || a.min.is_some() {
            let ok = ev.measured.is_some_and(|m| a.max.is_none_or(|hi| m <= hi) && a.min.is_none_or(|lo| m >= lo));
            summary.pass = Some(ok);
            failures += usize::from(!ok);
        }
        summary.measured = ev.measured;
        summary.detail = ev.detail;
        analyses.push(summary);
    }

    let status = if diverged.is_some() {
        "diverged"
    } else if failures > 0 {
        "fail"
    } else {
        "pass"
    };
    let generated_unix = (!opts.deterministic_summary)
        .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    let summary = Summary {
        generated_unix,
        status: status.into(),
        problem: ProblemSummary {
            name: spec.name.to_string(),
            scale: spec.scale.to_string(),
            seed: spec.seed,
            dim: inst.dim(),
            lipschitz: inst.objective.lipschitz(),
            f_star: inst.f_star,
            confident: inst.confident,
            cached,
        },
        run: runs,
        analysis: analyses,
    };
    output::write_summary(&out.join("summary.toml"), &summary)?;
    if !opts.quiet {
        print_report(&summary);
    }
    Ok(Report { out, summary, traces, diverged, failures })
}

fn print_report(s: &Summary) {
    let p = &s.problem;
    println!("problem {} ({}, seed {}), n = {}, f* = {:e}{}", p.name, p.scale, p.seed, p.dim, p.f_star, if p.confident { "" } else { " (uncertified)" });
    for r in &s.run {
        let gap = r.final_gap.map_or_else(|| "-".into(), |g| format!("{g:e}"));
        println!("  run {:<16} {:<17} {:<9} final gap {gap}", r.id, r.kind, r.status);
    }
    for a in &s.analysis {
        let measured = a.measured.map_or_else(|| "-".into(), |m| format!("{m:.6e}"));
        let bound = match (a.min, a.max) {
            (Some(lo), Some(hi)) => format!("in [{lo:e}, {hi:e}]"),
            (Some(lo), None) => format!(">= {lo:e}"),
            (None, Some(hi)) => format!("<= {hi:e}"),
            (None, None) => String::new(),
        };
        let verdict = match a.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "",
        };
        println!("  analysis {:<16} {:<20} {measured:<14} {bound:<24} {verdict}", a.id, a.op);
    }
    println!("status: {}", s.status);
}
