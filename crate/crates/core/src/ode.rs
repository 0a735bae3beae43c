//! Continuous-time engine for `Ẍ + (r/t)Ẋ + ∇f(X) = 0`, `X(0) = x0`, `Ẋ(0) = 0`.
//!
//! The singular damping is smoothed to `r/max(δ, t)` and the system is stepped
//! on a uniform grid `t_k = kΔt` with `Z_k ≈ Ẋ(t_k)`:
//!
//! ```text
//! X_{k+1} = X_k + Δt Z_k
//! Z_{k+1} = (Z_k − Δt ∇f(X_{k+1})) / (1 + rΔt/max(δ, t_k))
//! ```
//!
//! This [`Stepping::SemiImplicit`] form is stable on `f = ½Lx²` exactly when
//! `Δt < 2/√L`, and the implicit friction never reverses the velocity, even
//! where `rΔt/δ > 1` near `t = 0`. [`Stepping::Explicit`] is the literal
//! forward Euler pair with the gradient at `X_k` and factor
//! `1 − rΔt/max(δ, t_k)`; it has no stable step in the undamped limit and is
//! kept only for comparison.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Matrix};
use crate::objectives::{Quadratic, Smooth};
use crate::prox;
use crate::schemes::Optimum;

pub use crate::special::{bessel_j1, bessel_jnu};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stepping {
    /// Gradient at the freshly updated position, damping applied implicitly:
    /// `Z ← (Z − Δt∇f(X⁺))/(1 + rΔt/max(δ, t))`.
    #[default]
    SemiImplicit,
    /// The literal forward Euler pair: gradient at the old position and
    /// damping factor `1 − rΔt/max(δ, t)`.
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeParams {
    /// Damping numerator.
    pub r: f64,
    pub dt: f64,
    pub horizon: f64,
    /// Smoothing `δ` of the damping; `None` means `δ = Δt`.
    pub delta: Option<f64>,
    /// Speed-restarted dynamics.
    pub restart: bool,
    /// Minimum number of steps between restarts.
    pub restart_spacing: usize,
    pub stepping: Stepping,
    /// Keep every n-th grid point (the first is always kept).
    pub sample_every: usize,
}

impl OdeParams {
    pub fn new(dt: f64, horizon: f64) -> Self {
        OdeParams {
            r: 3.0,
            dt,
            horizon,
            delta: None,
            restart: false,
            restart_spacing: 10,
            stepping: Stepping::SemiImplicit,
            sample_every: 1,
        }
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = r;
        self
    }

    pub fn with_restart(mut self, restart: bool) -> Self {
        self.restart = restart;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn with_stepping(mut self, stepping: Stepping) -> Self {
        self.stepping = stepping;
        self
    }

    pub fn with_sample_every(mut self, every: usize) -> Self {
        self.sample_every = every;
        self
    }

    /// Number of steps `⌊T/Δt⌋`.
    pub fn steps(&self) -> usize {
        libm::floor(self.horizon / self.dt * (1.0 + 1e-12)) as usize
    }

    fn validate(&self) -> Result<()> {
        linalg::positive("dt", self.dt)?;
        if !(self.horizon >= self.dt && self.horizon.is_finite()) {
            return Err(Error::invalid(alloc::format!("horizon {} must be at least dt = {}", self.horizon, self.dt)));
        }
        if let Some(d) = self.delta {
            linalg::positive("delta", d)?;
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(Error::invalid(alloc::format!("r must be nonnegative, got {}", self.r)));
        }
        if self.sample_every == 0 {
            return Err(Error::invalid("sample_every must be at least 1"));
        }
        Ok(())
    }
}

/// Sampled trajectory `(t, X(t), Ẋ(t), f(X(t)) − f⋆)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousTrace {
    dim: usize,
    pub times: Vec<f64>,
    positions: Vec<f64>,
    velocities: Vec<f64>,
    pub f_gap: Vec<f64>,
    /// Times at which the restarted dynamics reset their clock.
    pub restart_times: Vec<f64>,
}

impl ContinuousTrace {
    pub fn new(dim: usize) -> Self {
        ContinuousTrace {
            dim,
            times: Vec::new(),
            positions: Vec::new(),
            velocities: Vec::new(),
            f_gap: Vec::new(),
            restart_times: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, x: &[f64], v: &[f64], f_gap: f64) {
        debug_assert_eq!(x.len(), self.dim);
        self.times.push(t);
        self.positions.extend_from_slice(x);
        self.velocities.extend_from_slice(v);
        self.f_gap.push(f_gap);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn v(&self, i: usize) -> &[f64] {
        &self.velocities[i * self.dim..(i + 1) * self.dim]
    }

    pub fn speed(&self, i: usize) -> f64 {
        linalg::norm(self.v(i))
    }

    pub fn horizon(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// `X(t)` by linear interpolation between samples; `None` outside the grid.
    pub fn position_at(&self, t: f64) -> Option<Vec<f64>> {
        let n = self.times.len();
        if n == 0 || t < self.times[0] || t > self.times[n - 1] * (1.0 + 1e-12) {
            return None;
        }
        let hi = self.times.partition_point(|&s| s < t).min(n - 1);
        if hi == 0 || self.times[hi] == t {
            return Some(self.x(hi).to_vec());
        }
        let lo = hi - 1;
        let w = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        Some(self.x(lo).iter().zip(self.x(hi)).map(|(a, b)| a + w * (b - a)).collect())
    }
}

/// Integrates the smoothed ODE for a smooth objective.
pub fn integrate<G: Smooth>(obj: &G, x0: &[f64], params: &OdeParams, f_star: impl Into<Optimum>) -> Result<ContinuousTrace> {
    check_dim(obj.dim(), x0.len())?;
    let opt = f_star.into();
    if opt == Optimum::Known && obj.known_gap(x0).is_none() {
        return Err(Error::invalid("objective has no known minimum; supply f_star"));
    }
    let gap = |x: &[f64]| match opt {
        Optimum::Value(fs) => obj.value(x) - fs,
        Optimum::Known => obj.known_gap(x).unwrap_or(f64::NAN),
    };
    integrate_with(x0, params, |x, _z, out| obj.gradient_into(x, out), gap)
}

/// Integrates `Ẍ + (r/t)Ẋ + G(X, Ẋ) = 0` for `f = ½‖AX − y‖² + λ‖X‖₁`, with `G`
/// the directional subgradient of [`prox::lasso_directional_subgradient`].
pub fn integrate_composite_lasso(
    a: &Matrix,
    y: &[f64],
    lambda: f64,
    x0: &[f64],
    params: &OdeParams,
    f_star: f64,
) -> Result<ContinuousTrace> {
    check_dim(a.rows(), y.len())?;
    check_dim(a.cols(), x0.len())?;
    if !(lambda >= 0.0) {
        return Err(Error::invalid("lambda must be nonnegative"));
    }
    let mut resid = vec![0.0; a.rows()];
    let value = |x: &[f64]| {
        let mut r = a.mul_vec(x);
        linalg::axpy(-1.0, y, &mut r);
        0.5 * linalg::norm_sq(&r) + lambda * x.iter().map(|v| v.abs()).sum::<f64>()
    };
    integrate_with(
        x0,
        params,
        |x, z, out| {
            a.mul_vec_into(x, &mut resid);
            linalg::axpy(-1.0, y, &mut resid);
            a.mul_t_vec_into(&resid, out);
            prox::lasso_select(out, lambda, x, z);
        },
        |x| value(x) - f_star,
    )
}

fn integrate_with(
    x0: &[f64],
    params: &OdeParams,
    mut force: impl FnMut(&[f64], &[f64], &mut [f64]),
    gap: impl Fn(&[f64]) -> f64,
) -> Result<ContinuousTrace> {
    params.validate()?;
    let n = x0.len();
    let dt = params.dt;
    let delta = params.delta.unwrap_or(dt);
    let steps = params.steps();

    let mut trace = ContinuousTrace::new(n);
    let mut x = x0.to_vec();
    let mut z = vec![0.0; n];
    let mut g = vec![0.0; n];
    trace.push(0.0, &x, &z, gap(&x));
    // Step index of the last clock reset; the start counts as one.
    let mut k_reset = 0usize;
    for k in 0..steps {
        let t_clock = (k - k_reset) as f64 * dt;
        let friction = params.r * dt / delta.max(t_clock);
        let z_old = z.clone();
        match params.stepping {
            Stepping::SemiImplicit => {
                linalg::axpy(dt, &z, &mut x);
                force(&x, &z, &mut g);
                let inv = 1.0 / (1.0 + friction);
                for (zi, gi) in z.iter_mut().zip(&g) {
                    *zi = inv * (*zi - dt * gi);
                }
            }
            Stepping::Explicit => {
                force(&x, &z, &mut g);
                linalg::axpy(dt, &z, &mut x);
                for (zi, gi) in z.iter_mut().zip(&g) {
                    *zi = (1.0 - friction) * *zi - dt * gi;
                }
            }
        }
        let t = (k + 1) as f64 * dt;
        if !linalg::is_finite(&x) || !linalg::is_finite(&z) {
            return Err(Error::OdeDivergence { t });
        }
        if params.restart && k + 1 - k_reset >= params.restart_spacing {
            // ⟨V_k, V_{k+1} − V_k⟩ ≤ 0 marks the speed maximum.
            let slope: f64 = z_old.iter().zip(&z).map(|(a, b)| a * (b - a)).sum();
            if slope <= 0.0 {
                k_reset = k + 1;
                z.iter_mut().for_each(|v| *v = 0.0);
                trace.restart_times.push(t);
            }
        }
        if (k + 1) % params.sample_every == 0 {
            let fg = gap(&x);
            if !fg.is_finite() {
                return Err(Error::OdeDivergence { t });
            }
            trace.push(t, &x, &z, fg);
        }
    }
    Ok(trace)
}

/// Exact solution for `f = ½ Σ λᵢxᵢ²`, applied per eigen-coordinate:
/// `Xᵢ(t) = x0ᵢ · 2^ν Γ(ν+1) J_ν(t√λᵢ)/(t√λᵢ)^ν` with `ν = (r − 1)/2`.
pub fn quadratic_closed_form(spec: &Quadratic, x0: &[f64], t: f64, r: f64) -> Result<Vec<f64>> {
    Ok(closed_form_state(spec, x0, t, r)?.0)
}

/// Position and velocity of the quadratic closed form at time `t`.
pub fn closed_form_state(spec: &Quadratic, x0: &[f64], t: f64, r: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dim(spec.dim(), x0.len())?;
    if !(t >= 0.0) {
        return Err(Error::invalid("t must be nonnegative"));
    }
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::invalid("closed form needs r ≥ 1"));
    }
    let nu = 0.5 * (r - 1.0);
    let mut x = Vec::with_capacity(x0.len());
    let mut v = Vec::with_capacity(x0.len());
    for (xi, l) in x0.iter().zip(spec.eigenvalues()) {
        let w = libm::sqrt(*l);
        let u = t * w;
        x.push(xi * crate::special::bessel_normalized(nu, u));
        // d/du N_ν(u) = −u N_{ν+1}(u) / (2(ν+1))
        v.push(-xi * w * u * crate::special::bessel_normalized(nu + 1.0, u) / (2.0 * (nu + 1.0)));
    }
    Ok((x, v))
}

/// Closed-form trajectory sampled on the grid `kΔt`, `k ≤ ⌊T/Δt⌋`.
pub fn closed_form_trace(spec: &Quadratic, x0: &[f64], r: f64, dt: f64, horizon: f64) -> Result<ContinuousTrace> {
    OdeParams::new(dt, horizon).validate()?;
    let steps = OdeParams::new(dt, horizon).steps();
    let mut trace = ContinuousTrace::new(x0.len());
    for k in 0..=steps {
        let t = k as f64 * dt;
        let (x, v) = closed_form_state(spec, x0, t, r)?;
        let fg = spec.value(&x);
        trace.push(t, &x, &v, fg);
    }
    Ok(trace)
}
