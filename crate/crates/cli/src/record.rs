//! Instance cache: one TOML record per `(name, scale, seed)`, written once.
//!
//! The record carries every array of the instance (matrices row-major) so it
//! is self-describing. On reuse the objective is regenerated from its seed and
//! compared with the record, and only the reference optimum is taken from the
//! file, which skips the reference solve.

use std::fs::OpenOptions;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use nesterov_ode::linalg::Matrix;
use nesterov_ode::problems::{build, generate};
use nesterov_ode::{CompositeObjective, ProblemInstance, ProblemSpec, ProxSpec, StandardObjective};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub data: Vec<f64>,
}

impl From<&Matrix> for MatrixRecord {
    fn from(m: &Matrix) -> Self {
        MatrixRecord { rows: m.rows(), cols: m.cols(), data: m.data().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SmoothRecord {
    Quadratic { eigenvalues: Vec<f64> },
    DenseQuadratic { linear: Vec<f64>, matrix: MatrixRecord },
    LeastSquares { scale: f64, response: Vec<f64>, design: MatrixRecord },
    Logistic { labels: Vec<f64>, design: MatrixRecord },
    LogSumExp { rho: f64, offsets: Vec<f64>, design: MatrixRecord },
    MaskedFrobenius { rows: usize, cols: usize, index: Vec<usize>, value: Vec<f64> },
    Huber { dim: usize, delta: f64 },
    LinearRamp { cap: f64, kappa: f64 },
}

impl SmoothRecord {
    pub fn of(g: &StandardObjective) -> Result<Self> {
        use nesterov_ode::Smooth;
        Ok(match g {
            StandardObjective::Quadratic(q) => SmoothRecord::Quadratic { eigenvalues: q.eigenvalues().to_vec() },
            StandardObjective::DenseQuadratic(q) => {
                SmoothRecord::DenseQuadratic { linear: q.linear().to_vec(), matrix: q.matrix().into() }
            }
            StandardObjective::LeastSquares(ls) => SmoothRecord::LeastSquares {
                scale: ls.scale(),
                response: ls.response().to_vec(),
                design: ls.design().into(),
            },
            StandardObjective::Logistic(l) => {
                SmoothRecord::Logistic { labels: l.labels().to_vec(), design: l.design().into() }
            }
            StandardObjective::LogSumExp(l) => {
                SmoothRecord::LogSumExp { rho: l.rho(), offsets: l.offsets().to_vec(), design: l.design().into() }
            }
            StandardObjective::MaskedFrobenius(m) => {
                let (rows, cols) = m.shape();
                let (index, value) = m.observed().iter().copied().unzip();
                SmoothRecord::MaskedFrobenius { rows, cols, index, value }
            }
            StandardObjective::Huber(h) => SmoothRecord::Huber { dim: h.dim(), delta: h.delta() },
            StandardObjective::LinearRamp(r) => SmoothRecord::LinearRamp { cap: r.cap(), kappa: r.kappa() },
            other => return Err(CliError::config(format!("no record form for {}", nesterov_ode::objectives::kind_name(other)))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PenaltyRecord {
    Zero,
    L1 { lambda: f64 },
    NonNeg,
    L1Ball { radius: f64 },
    Nuclear { lambda: f64, rows: usize, cols: usize },
    SortedL1 { weights: Vec<f64> },
}

impl PenaltyRecord {
    pub fn of(h: &ProxSpec) -> Result<Self> {
        Ok(match h {
            ProxSpec::Zero => PenaltyRecord::Zero,
            ProxSpec::L1 { lambda } => PenaltyRecord::L1 { lambda: *lambda },
            ProxSpec::NonNeg => PenaltyRecord::NonNeg,
            ProxSpec::L1Ball { radius } => PenaltyRecord::L1Ball { radius: *radius },
            ProxSpec::Nuclear { lambda, rows, cols } => PenaltyRecord::Nuclear { lambda: *lambda, rows: *rows, cols: *cols },
            ProxSpec::SortedL1 { weights } => PenaltyRecord::SortedL1 { weights: weights.clone() },
            other => return Err(CliError::config(format!("no record form for penalty {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub name: String,
    pub scale: String,
    pub seed: u64,
    pub dim: usize,
    pub lipschitz: f64,
    pub f_star: f64,
    /// The optimum is analytic or certified by the reference solve.
    pub confident: bool,
    pub x0: Vec<f64>,
    pub x_star: Vec<f64>,
    pub smooth: SmoothRecord,
    pub penalty: PenaltyRecord,
}

impl InstanceRecord {
    pub fn of(inst: &ProblemInstance) -> Result<Self> {
        let spec = inst.spec;
        Ok(InstanceRecord {
            name: spec.name.to_string(),
            scale: spec.scale.to_string(),
            seed: spec.seed,
            dim: inst.dim(),
            lipschitz: inst.objective.lipschitz(),
            f_star: inst.f_star,
            confident: inst.confident,
            x0: inst.x0.clone(),
            x_star: inst.x_star.clone(),
            smooth: SmoothRecord::of(&inst.objective.g)?,
            penalty: PenaltyRecord::of(&inst.objective.h)?,
        })
    }

    /// Whether the record describes `obj` started at `x0` under `spec`.
    fn matches(&self, spec: &ProblemSpec, obj: &CompositeObjective, x0: &[f64]) -> Result<bool> {
        Ok(self.name == spec.name.as_str()
            && self.scale == spec.scale.as_str()
            && self.seed == spec.seed
            && self.x0 == x0
            && self.x_star.len() == obj.dim()
            && self.smooth == SmoothRecord::of(&obj.g)?
            && self.penalty == PenaltyRecord::of(&obj.h)?)
    }
}

pub fn cache_path(dir: &Path, spec: &ProblemSpec) -> PathBuf {
    dir.join(format!("{}-{}-seed{}.toml", spec.name, spec.scale, spec.seed))
}

/// Loads the instance through the cache in `dir`, generating and recording
/// it on a miss. Returns the instance and whether it came from the cache.
pub fn load_or_generate(dir: &Path, spec: &ProblemSpec) -> Result<(ProblemInstance, bool)> {
    let path = cache_path(dir, spec);
    match std::fs::read_to_string(&path) {
        Ok(text) => {
            let rec: InstanceRecord =
                toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            let (objective, x0) = build(spec)?;
            if !rec.matches(spec, &objective, &x0)? {
                return Err(CliError::config(format!(
                    "{} does not match the generated instance; remove it to regenerate",
                    path.display()
                )));
            }
            let inst =
                ProblemInstance { spec: *spec, objective, x0, f_star: rec.f_star, x_star: rec.x_star, confident: rec.confident };
            Ok((inst, true))
        }
        Err(e) if e.kind() == ErrorKind::NotFound => {
            let inst = generate(spec)?;
            write_once(dir, &path, &InstanceRecord::of(&inst)?)?;
            Ok((inst, false))
        }
        Err(e) => Err(CliError::io(path, e)),
    }
}

fn write_once(dir: &Path, path: &Path, rec: &InstanceRecord) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let text = toml::to_string(rec).map_err(|e| CliError::config(e.to_string()))?;
    match OpenOptions::new().write(true).create_new(true).open(path) {
        Ok(mut f) => f.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e)),
        // Another writer got there first; its record is identical by determinism.
        Err(e) if e.kind() == ErrorKind::AlreadyExists => Ok(()),
        Err(e) => Err(CliError::io(path, e)),
    }
}
