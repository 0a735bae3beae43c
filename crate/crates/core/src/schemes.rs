//! Discrete iterations: proximal gradient descent, the r-parameterized
//! accelerated scheme, and its speed- and gradient-restarted variants.
//!
//! All runs share one loop. With counter `j` (equal to `k` unless a restart
//! resets it) the iteration is
//!
//! ```text
//! x_k = prox(h, y_{k−1} − s∇g(y_{k−1}), s)
//! y_k = x_k + (j − 1)/(j + r − 1) · (x_k − x_{k−1})
//! ```
//!
//! starting from `y_0 = x_0`. The budget `k_max` is the only stopping rule.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::objectives::{CompositeObjective, Smooth};
use crate::prox::prox_point;

/// Restart policy of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Restart {
    #[default]
    None,
    /// Reset when the step norm decreases.
    Speed,
    /// Reset when the objective increases.
    Gradient,
}

/// Which iteration produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    GradientDescent,
    Nesterov,
    SpeedRestart,
    GradientRestart,
    /// An accelerated loop with a caller-supplied momentum sequence.
    CustomMomentum,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::GradientDescent => "gradient-descent",
            SchemeKind::Nesterov => "nesterov",
            SchemeKind::SpeedRestart => "speed-restart",
            SchemeKind::GradientRestart => "gradient-restart",
            SchemeKind::CustomMomentum => "custom-momentum",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeParams {
    /// Step size `s`; must satisfy `0 < s ≤ 1/L` unless `allow_large_step`.
    pub step: f64,
    /// Momentum parameter; `r = 3` is the classical scheme.
    pub r: f64,
    pub k_max: usize,
    /// Minimum counter value before a restart may fire.
    pub k_min: usize,
    pub restart: Restart,
    pub allow_large_step: bool,
    /// Keep every `x_k` in the trace (needed by the discrete energies).
    pub keep_iterates: bool,
}

impl SchemeParams {
    /// Classical scheme (`r = 3`, no restart, `k_min = 10`) keeping all iterates.
    pub fn new(step: f64, k_max: usize) -> Self {
        SchemeParams { step, r: 3.0, k_max, k_min: 10, restart: Restart::None, allow_large_step: false, keep_iterates: true }
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = r;
        self
    }

    pub fn with_restart(mut self, restart: Restart) -> Self {
        self.restart = restart;
        self
    }

    pub fn with_k_min(mut self, k_min: usize) -> Self {
        self.k_min = k_min;
        self
    }

    pub fn allow_large_step(mut self, allow: bool) -> Self {
        self.allow_large_step = allow;
        self
    }

    pub fn keep_iterates(mut self, keep: bool) -> Self {
        self.keep_iterates = keep;
        self
    }

    /// `(k − 1)/(k + r − 1)`
    pub fn momentum(&self, k: usize) -> f64 {
        (k as f64 - 1.0) / (k as f64 + self.r - 1.0)
    }

    fn validate(&self, lipschitz: f64) -> Result<()> {
        let s = self.step;
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::invalid(format!("step must be positive, got {s}")));
        }
        if !self.allow_large_step && s * lipschitz > 1.0 + 1e-12 {
            return Err(Error::invalid(format!(
                "step {s} exceeds 1/L = {}; set allow_large_step to override",
                1.0 / lipschitz
            )));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::invalid(format!("r must be positive, got {}", self.r)));
        }
        if self.restart != Restart::None && self.k_min == 0 {
            return Err(Error::invalid("k_min must be at least 1"));
        }
        Ok(())
    }
}

/// One row of an [`IterateTrace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    pub k: usize,
    /// `f(x_k) − f⋆`
    pub f_gap: f64,
    /// `‖x_k − x_{k−1}‖`, zero at `k = 0`.
    pub step_norm: f64,
    /// The counter was reset after this iteration.
    pub restarted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateTrace {
    pub kind: SchemeKind,
    pub params: SchemeParams,
    pub records: Vec<IterRecord>,
    dim: usize,
    /// Flat `x_0, x_1, …` when `keep_iterates` is set.
    iterates: Option<Vec<f64>>,
    last: Vec<f64>,
}

impl IterateTrace {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `x_k`, if iterates were kept.
    pub fn x(&self, k: usize) -> Option<&[f64]> {
        let it = self.iterates.as_ref()?;
        it.get(k * self.dim..(k + 1) * self.dim)
    }

    pub fn has_iterates(&self) -> bool {
        self.iterates.is_some()
    }

    pub fn last_x(&self) -> &[f64] {
        &self.last
    }

    pub fn f_gaps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.f_gap).collect()
    }

    /// Iteration indices after which the counter was reset.
    pub fn restart_indices(&self) -> Vec<usize> {
        self.records.iter().filter(|r| r.restarted).map(|r| r.k).collect()
    }

    /// Counter `j` used to form `y_k` (`j_1 = 1`; resets to 1 after a restart).
    pub fn counters(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.records.len());
        out.push(0);
        let mut j = 1;
        for rec in self.records.iter().skip(1) {
            out.push(j);
            j = if rec.restarted { 1 } else { j + 1 };
        }
        out
    }
}

/// Reference value used to turn `f(x_k)` into a gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimum {
    /// Use the objective's own exact gap.
    Known,
    Value(f64),
}

impl From<f64> for Optimum {
    fn from(v: f64) -> Self {
        Optimum::Value(v)
    }
}

fn gap<G: Smooth>(obj: &CompositeObjective<G>, x: &[f64], f: f64, opt: Optimum) -> Result<f64> {
    match opt {
        Optimum::Value(fs) => Ok(f - fs),
        Optimum::Known => obj
            .known_gap(x)
            .ok_or_else(|| Error::invalid("objective has no known minimum; supply f_star")),
    }
}

fn drive<G: Smooth>(
    obj: &CompositeObjective<G>,
    x0: &[f64],
    params: &SchemeParams,
    opt: Optimum,
    kind: SchemeKind,
    momentum: &dyn Fn(usize) -> f64,
) -> Result<IterateTrace> {
    let n = obj.dim();
    check_dim(n, x0.len())?;
    params.validate(obj.lipschitz())?;
    let s = params.step;

    let mut f_prev = obj.value(x0);
    let mut records = Vec::with_capacity(params.k_max + 1);
    records.push(IterRecord { k: 0, f_gap: gap(obj, x0, f_prev, opt)?, step_norm: 0.0, restarted: false });
    let mut iterates = params.keep_iterates.then(|| {
        let mut v = Vec::with_capacity((params.k_max + 1) * n);
        v.extend_from_slice(x0);
        v
    });

    let mut x_prev = x0.to_vec();
    let mut y = x0.to_vec();
    let mut grad = alloc::vec![0.0; n];
    let mut step_prev = 0.0;
    let mut j = 1usize;
    for k in 1..=params.k_max {
        obj.g.gradient_into(&y, &mut grad);
        let x = prox_point(obj, &y, &grad, s)?;
        let f = obj.value(&x);
        if !linalg::is_finite(&x) || !f.is_finite() {
            return Err(Error::Divergence { iteration: k });
        }
        let step_norm = linalg::dist(&x, &x_prev);
        let beta = momentum(j);
        for ((yi, xi), xp) in y.iter_mut().zip(&x).zip(&x_prev) {
            *yi = xi + beta * (xi - xp);
        }
        let fire = match params.restart {
            Restart::None => false,
            Restart::Speed => step_norm < step_prev,
            Restart::Gradient => f > f_prev,
        };
        let restarted = fire && j >= params.k_min;
        j = if restarted { 1 } else { j + 1 };

        records.push(IterRecord { k, f_gap: gap(obj, &x, f, opt)?, step_norm, restarted });
        if let Some(it) = iterates.as_mut() {
            it.extend_from_slice(&x);
        }
        step_prev = step_norm;
        f_prev = f;
        x_prev = x;
    }
    Ok(IterateTrace { kind, params: params.clone(), records, dim: n, iterates, last: x_prev })
}

/// The accelerated scheme with momentum `(k − 1)/(k + r − 1)`.
pub fn nesterov_run<G: Smooth>(
    obj: &CompositeObjective<G>,
    x0: &[f64],
    params: &SchemeParams,
    f_star: impl Into<Optimum>,
) -> Result<IterateTrace> {
    if params.restart != Restart::None {
        return Err(Error::invalid("nesterov_run expects restart = none"));
    }
    drive(obj, x0, params, f_star.into(), SchemeKind::Nesterov, &|k| params.momentum(k))
}

/// The accelerated loop with an arbitrary momentum sequence `β(k)`.
///
/// Used to check that the rate certificates detect a perturbed coefficient.
pub fn nesterov_run_with_momentum<G: Smooth>(
    obj: &CompositeObjective<G>,
    x0: &[f64],
    params: &SchemeParams,
    f_star: impl Into<Optimum>,
    momentum: impl Fn(usize) -> f64,
) -> Result<IterateTrace> {
    let params = params.clone().with_restart(Restart::None);
    drive(obj, x0, &params, f_star.into(), SchemeKind::CustomMomentum, &momentum)
}

/// Proximal gradient descent `x_{k+1} = x_k − s·G_s(x_k)`.
pub fn gradient_descent_run<G: Smooth>(
    obj: &CompositeObjective<G>,
    x0: &[f64],
    step: f64,
    k_max: usize,
    f_star: impl Into<Optimum>,
) -> Result<IterateTrace> {
    let params = SchemeParams::new(step, k_max);
    gradient_descent_with(obj, x0, &params, f_star.into())
}

fn gradient_descent_with<G: Smooth>(
    obj: &CompositeObjective<G>,
    x0: &[f64],
    params: &SchemeParams,
    opt: Optimum,
) -> Result<IterateTrace> {
    let params = params.clone().with_restart(Restart::None);
    drive(obj, x0, &params, opt, SchemeKind::GradientDescent, &|_| 0.0)
}

/// Speed restarting: reset the counter when `‖x_k − x_{k−1}‖ < ‖x_{k−1} − x_{k−2}‖`
/// and `j ≥ k_min`.
pub fn speed_restart_run<G: Smooth>(
    obj: &CompositeObjective<G>,
    x0: &[f64],
    params: &SchemeParams,
    f_star: impl Into<Optimum>,
) -> Result<IterateTrace> {
    let params = params.clone().with_restart(Restart::Speed);
    drive(obj, x0, &params, f_star.into(), SchemeKind::SpeedRestart, &|j| params.momentum(j))
}

/// Gradient restarting: reset the counter when `f(x_k) > f(x_{k−1})` and `j ≥ k_min`.
pub fn gradient_restart_run<G: Smooth>(
    obj: &CompositeObjective<G>,
    x0: &[f64],
    params: &SchemeParams,
    f_star: impl Into<Optimum>,
) -> Result<IterateTrace> {
    let params = params.clone().with_restart(Restart::Gradient);
    drive(obj, x0, &params, f_star.into(), SchemeKind::GradientRestart, &|j| params.momentum(j))
}

/// Dispatches on `params.restart`.
pub fn run<G: Smooth>(
    obj: &CompositeObjective<G>,
    x0: &[f64],
    params: &SchemeParams,
    f_star: impl Into<Optimum>,
) -> Result<IterateTrace> {
    match params.restart {
        Restart::None => nesterov_run(obj, x0, params, f_star),
        Restart::Speed => speed_restart_run(obj, x0, params, f_star),
        Restart::Gradient => gradient_restart_run(obj, x0, params, f_star),
    }
}

/// Either accelerated or plain proximal gradient, for callers holding a kind.
pub fn run_kind<G: Smooth>(
    kind: SchemeKind,
    obj: &CompositeObjective<G>,
    x0: &[f64],
    params: &SchemeParams,
    f_star: impl Into<Optimum>,
) -> Result<IterateTrace> {
    match kind {
        SchemeKind::GradientDescent => gradient_descent_with(obj, x0, params, f_star.into()),
        SchemeKind::Nesterov | SchemeKind::CustomMomentum => {
            nesterov_run(obj, x0, &params.clone().with_restart(Restart::None), f_star)
        }
        SchemeKind::SpeedRestart => speed_restart_run(obj, x0, params, f_star),
        SchemeKind::GradientRestart => gradient_restart_run(obj, x0, params, f_star),
    }
}
