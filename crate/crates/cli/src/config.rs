//! Experiment configs: one `[problem]` table, repeated `[[run]]` and
//! `[[analysis]]` sections, and an optional `[output]` table.
//!
//! ```toml
//! [problem]
//! name = "quadratic"
//! scale = "desk"
//! seed = 42
//!
//! [[run]]
//! id = "srN"
//! kind = "speed-restart"
//! k_max = 3000
//!
//! [[run]]
//! id = "ode"
//! kind = "ode"
//! dt = 1e-3
//! horizon = 20.0
//!
//! [[analysis]]
//! id = "srN-fit"
//! op = "linear-rate-fit"
//! run = "srN"
//! window = [100.0, 3000.0]
//! max = 0.0
//! ```
//!
//! The full key reference is in `configs/README.md`.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use nesterov_ode::problems::DEFAULT_SEED;
use nesterov_ode::{ProblemName, ProblemSpec, Scale};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSection,
    #[serde(default, rename = "run")]
    pub runs: Vec<RunConfig>,
    #[serde(default, rename = "analysis")]
    pub analyses: Vec<AnalysisConfig>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub name: String,
    pub scale: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunKind {
    Nesterov,
    GradientDescent,
    SpeedRestart,
    GradientRestart,
    Ode,
    OdeRestart,
    CompositeOde,
    ClosedForm,
}

impl RunKind {
    pub fn is_scheme(self) -> bool {
        matches!(self, RunKind::Nesterov | RunKind::GradientDescent | RunKind::SpeedRestart | RunKind::GradientRestart)
    }

    pub fn name(self) -> &'static str {
        match self {
            RunKind::Nesterov => "nesterov",
            RunKind::GradientDescent => "gradient-descent",
            RunKind::SpeedRestart => "speed-restart",
            RunKind::GradientRestart => "gradient-restart",
            RunKind::Ode => "ode",
            RunKind::OdeRestart => "ode-restart",
            RunKind::CompositeOde => "composite-ode",
            RunKind::ClosedForm => "closed-form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SteppingName {
    SemiImplicit,
    Explicit,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub id: String,
    pub kind: RunKind,
    /// Scheme step `s`; defaults to `1/L`.
    pub step: Option<f64>,
    pub r: Option<f64>,
    pub k_max: Option<usize>,
    pub k_min: Option<usize>,
    #[serde(default)]
    pub allow_large_step: bool,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub delta: Option<f64>,
    pub stepping: Option<SteppingName>,
    pub sample_every: Option<usize>,
    /// Adds `x0..x{n-1}` columns to an ODE trace (n ≤ 4).
    #[serde(default)]
    pub x_columns: bool,
}

impl RunConfig {
    pub fn scheme(id: impl Into<String>, kind: RunKind, k_max: usize) -> Self {
        RunConfig {
            id: id.into(),
            kind,
            step: None,
            r: None,
            k_max: Some(k_max),
            k_min: None,
            allow_large_step: false,
            dt: None,
            horizon: None,
            delta: None,
            stepping: None,
            sample_every: None,
            x_columns: false,
        }
    }

    pub fn ode(id: impl Into<String>, kind: RunKind, dt: f64, horizon: f64) -> Self {
        RunConfig { k_max: None, dt: Some(dt), horizon: Some(horizon), ..RunConfig::scheme(id, kind, 0) }
    }

    pub fn r(&self) -> f64 {
        self.r.unwrap_or(3.0)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(CliError::config(format!("run `{}`: {msg}", self.id)));
        if self.kind.is_scheme() {
            if self.k_max.is_none() {
                return bad("scheme runs need `k_max`");
            }
            let ode_keys = [self.dt.is_some(), self.horizon.is_some(), self.delta.is_some(), self.stepping.is_some()];
            if ode_keys.iter().any(|b| *b) || self.sample_every.is_some() || self.x_columns {
                return bad("dt, horizon, delta, stepping, sample_every and x_columns apply to ODE runs only");
            }
            if self.kind == RunKind::GradientDescent && (self.r.is_some() || self.k_min.is_some()) {
                return bad("gradient descent takes no `r` or `k_min`");
            }
        } else {
            if self.dt.is_none() || self.horizon.is_none() {
                return bad("ODE runs need `dt` and `horizon`");
            }
            if self.step.is_some() || self.k_max.is_some() || self.k_min.is_some() || self.allow_large_step {
                return bad("step, k_max, k_min and allow_large_step apply to scheme runs only");
            }
            if self.kind == RunKind::ClosedForm && (self.delta.is_some() || self.stepping.is_some()) {
                return bad("closed-form runs take no `delta` or `stepping`");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalysisOp {
    /// `grid^power · f_gap`, measured as its maximum over `window`.
    ScaledError,
    /// Max of the scaled error over `[hi/10, hi]` divided by its max over `[lo, 10·lo]`.
    ScaledErrorGrowth,
    /// `f_gap(k)` over the generalized-rate bound, measured as the worst ratio.
    RateCertificate,
    /// Largest energy increase relative to `E(0)`.
    Energy,
    /// Mean spacing of the sign changes of one coordinate about `x⋆`.
    OscillationRoots,
    /// `max ‖Ẋ(t)‖/t` over `[0, t_end]`.
    VelocityRatio,
    /// `max_k ‖x_k − X(k√s)‖` between a scheme run and an ODE run.
    Deviation,
    /// Slope of `log f_gap` against `k` over `window`.
    LinearRateFit,
    /// `k₁√s` for schemes, the first reset time for the restarted ODE.
    FirstRestart,
    FinalGap,
}

impl AnalysisOp {
    pub fn name(self) -> &'static str {
        match self {
            AnalysisOp::ScaledError => "scaled-error",
            AnalysisOp::ScaledErrorGrowth => "scaled-error-growth",
            AnalysisOp::RateCertificate => "rate-certificate",
            AnalysisOp::Energy => "energy",
            AnalysisOp::OscillationRoots => "oscillation-roots",
            AnalysisOp::VelocityRatio => "velocity-ratio",
            AnalysisOp::Deviation => "deviation",
            AnalysisOp::LinearRateFit => "linear-rate-fit",
            AnalysisOp::FirstRestart => "first-restart",
            AnalysisOp::FinalGap => "final-gap",
        }
    }

    fn arity(self) -> usize {
        if self == AnalysisOp::Deviation {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyName {
    /// `r = 3` continuous energy.
    R3,
    /// General-`r` continuous energy.
    R,
    /// Strongly convex continuous energy; needs `alpha` and `mu`.
    Alpha,
    DiscreteR,
    DiscreteT3,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub id: String,
    pub op: AnalysisOp,
    pub run: Option<String>,
    #[serde(default)]
    pub runs: Vec<String>,
    pub power: Option<f64>,
    pub variant: Option<EnergyName>,
    pub alpha: Option<f64>,
    pub mu: Option<f64>,
    pub coord: Option<usize>,
    pub t_end: Option<f64>,
    pub window: Option<[f64; 2]>,
    /// Asserted upper bound on the measured value.
    pub max: Option<f64>,
    /// Asserted lower bound on the measured value.
    pub min: Option<f64>,
}

impl AnalysisConfig {
    pub fn new(id: impl Into<String>, op: AnalysisOp, runs: Vec<String>) -> Self {
        AnalysisConfig {
            id: id.into(),
            op,
            run: None,
            runs,
            power: None,
            variant: None,
            alpha: None,
            mu: None,
            coord: None,
            t_end: None,
            window: None,
            max: None,
            min: None,
        }
    }

    /// `run` and `runs` merged, in order.
    pub fn run_ids(&self) -> Vec<&str> {
        self.run.iter().chain(&self.runs).map(String::as_str).collect()
    }
}

fn check_id(kind: &str, id: &str) -> Result<()> {
    let ok = !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.');
    if ok && !id.starts_with('.') {
        Ok(())
    } else {
        Err(CliError::config(format!("{kind} id `{id}` must be non-empty ASCII letters, digits, `-`, `_` or `.`")))
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Unique ids, known run references, and per-kind keys.
    pub fn validate(&self) -> Result<()> {
        self.spec(None, None)?;
        if self.runs.is_empty() {
            return Err(CliError::config("no [[run]] sections: at least one run is required"));
        }
        let mut seen = HashSet::new();
        for run in &self.runs {
            check_id("run", &run.id)?;
            if !seen.insert(run.id.as_str()) {
                return Err(CliError::config(format!("duplicate run id `{}`", run.id)));
            }
            run.validate()?;
        }
        let mut analyses = HashSet::new();
        for a in &self.analyses {
            check_id("analysis", &a.id)?;
            if !analyses.insert(a.id.as_str()) {
                return Err(CliError::config(format!("duplicate analysis id `{}`", a.id)));
            }
            let ids = a.run_ids();
            if ids.len() != a.op.arity() {
                return Err(CliError::config(format!(
                    "analysis `{}` ({}) needs {} run reference(s), found {}",
                    a.id,
                    a.op.name(),
                    a.op.arity(),
                    ids.len()
                )));
            }
            for id in ids {
                if !seen.contains(id) {
                    return Err(CliError::config(format!("analysis `{}` references unknown run `{id}`", a.id)));
                }
            }
            if let (Some(lo), Some(hi)) = (a.min, a.max) {
                if lo > hi {
                    return Err(CliError::config(format!("analysis `{}`: min {lo} > max {hi}", a.id)));
                }
            }
        }
        Ok(())
    }

    /// The problem spec, with command-line overrides applied.
    pub fn spec(&self, scale: Option<Scale>, seed: Option<u64>) -> Result<ProblemSpec> {
        let name: ProblemName = self.problem.name.parse().map_err(|e: nesterov_ode::Error| CliError::config(e.to_string()))?;
        let scale = match (scale, &self.problem.scale) {
            (Some(s), _) => s,
            (None, Some(s)) => s.parse().map_err(|e: nesterov_ode::Error| CliError::config(e.to_string()))?,
            (None, None) => Scale::Desk,
        };
        Ok(ProblemSpec::new(name, scale, seed.or(self.problem.seed).unwrap_or(DEFAULT_SEED)))
    }
}
