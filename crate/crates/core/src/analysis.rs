//! Diagnostics over traces: Lyapunov energies, scaled errors, oscillation
//! roots, velocity ratios, scheme-to-ODE deviation and rate fits.

use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::ode::ContinuousTrace;
use crate::schemes::IterateTrace;

/// Which energy functional to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyVariant {
    /// `t²(f − f⋆) + 2‖X + tẊ/2 − x⋆‖²`
    ContinuousR3,
    /// `2t²/(r−1)·(f − f⋆) + (r−1)‖X + tẊ/(r−1) − x⋆‖²`, `r > 1`.
    ContinuousR { r: f64 },
    /// `t^α(f − f⋆) + (2r−α)²t^{α−2}/8·‖X + 2tẊ/(2r−α) − x⋆‖²` for a
    /// `μ`-strongly convex `f`, `2 ≤ α ≤ 2r/3`.
    ContinuousAlpha { r: f64, alpha: f64, mu: f64 },
    /// `2(k+r−2)²s/(r−1)·(f(x_k) − f⋆) + (r−1)‖z_k − x⋆‖²` with
    /// `z_k = ((k+r−1)y_k − k x_k)/(r−1)`.
    DiscreteR { r: f64 },
    /// `s(2k+3r−5)(2k+2r−5)(4k+4r−9)/16·(f(x_k) − f⋆)
    ///  + (2k+3r−5)/16·‖2(k+r−1)y_k − (2k+1)x_k − (2r−3)x⋆‖²`
    DiscreteT3 { r: f64 },
}

/// Energy values on the grid of the underlying trace.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    pub variant: EnergyVariant,
    /// Times `t` or indices `k` as floats.
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Set when the parameters fall outside the range where monotonicity is
    /// guaranteed.
    pub warning: Option<&'static str>,
}

impl EnergySeries {
    /// `max_j (E_{j+1} − E_j)`, or `−∞` for fewer than two samples.
    pub fn max_increase(&self) -> f64 {
        self.values.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_nonincreasing(&self, slack: f64) -> bool {
        self.values.windows(2).all(|w| w[1] - w[0] <= slack)
    }

    pub fn first(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Evaluates a continuous-time energy at every sample of `trace`.
pub fn energy_continuous(trace: &ContinuousTrace, x_star: &[f64], variant: EnergyVariant) -> Result<EnergySeries> {
    check_dim(trace.dim(), x_star.len())?;
    let warning = match variant {
        EnergyVariant::ContinuousR3 => None,
        EnergyVariant::ContinuousR { r } => {
            if !(r > 1.0) {
                return Err(Error::invalid("continuous r energy needs r > 1"));
            }
            (r < 3.0).then_some("energy is nonincreasing only for r >= 3")
        }
        EnergyVariant::ContinuousAlpha { r, alpha, mu } => {
            if !(mu > 0.0) {
                return Err(Error::invalid("alpha energy needs a strong convexity modulus mu > 0"));
            }
            if !(alpha >= 2.0 && alpha <= 2.0 * r / 3.0) {
                return Err(Error::invalid("alpha energy needs 2 <= alpha <= 2r/3"));
            }
            Some("alpha energy is bounded, not monotone, before t_alpha")
        }
        _ => return Err(Error::invalid("discrete energy variant given to energy_continuous")),
    };
    let mut values = Vec::with_capacity(trace.len());
    for i in 0..trace.len() {
        let t = trace.times[i];
        let (f_w, n_w, a) = continuous_weights(variant, t);
        let d: f64 = trace
            .x(i)
            .iter()
            .zip(trace.v(i))
            .zip(x_star)
            .map(|((x, v), xs)| {
                let e = x + a * v - xs;
                e * e
            })
            .sum();
        values.push(f_w * trace.f_gap[i] + n_w * d);
    }
    Ok(EnergySeries { variant, grid: trace.times.clone(), values, warning })
}

/// `(gap weight, distance weight, velocity coefficient)` of a continuous energy
/// written as `w_f(t)(f − f⋆) + w_d(t)‖X + a(t)Ẋ − x⋆‖²`.
fn continuous_weights(variant: EnergyVariant, t: f64) -> (f64, f64, f64) {
    match variant {
        EnergyVariant::ContinuousR { r } => (2.0 * t * t / (r - 1.0), r - 1.0, t / (r - 1.0)),
        EnergyVariant::ContinuousAlpha { r, alpha, .. } => {
            let c = 2.0 * r - alpha;
            (libm::pow(t, alpha), c * c * libm::pow(t, alpha - 2.0) / 8.0, 2.0 * t / c)
        }
        _ => (t * t, 2.0, 0.5 * t),
    }
}

/// `y_k` recomputed from the stored `x_k` and the trace's momentum counters.
pub fn reconstruct_y(trace: &IterateTrace) -> Result<Vec<Vec<f64>>> {
    if !trace.has_iterates() {
        return Err(Error::invalid("trace was recorded without iterates"));
    }
    let counters = trace.counters();
    let r = trace.params.r;
    let momentum_free = trace.kind == crate::schemes::SchemeKind::GradientDescent;
    let mut ys = Vec::with_capacity(trace.len());
    ys.push(trace.x(0).expect("iterates kept").to_vec());
    for k in 1..trace.len() {
        let x = trace.x(k).expect("iterates kept");
        let xp = trace.x(k - 1).expect("iterates kept");
        let j = counters[k] as f64;
        let beta = if momentum_free { 0.0 } else { (j - 1.0) / (j + r - 1.0) };
        ys.push(x.iter().zip(xp).map(|(a, b)| a + beta * (a - b)).collect());
    }
    Ok(ys)
}

/// Evaluates a discrete energy along a scheme trace recorded with `keep_iterates`.
pub fn energy_discrete(trace: &IterateTrace, x_star: &[f64], variant: EnergyVariant) -> Result<EnergySeries> {
    check_dim(trace.dim(), x_star.len())?;
    let r = match variant {
        EnergyVariant::DiscreteR { r } | EnergyVariant::DiscreteT3 { r } => r,
        _ => return Err(Error::invalid("continuous energy variant given to energy_discrete")),
    };
    if (r - trace.params.r).abs() > 1e-12 * r.abs().max(1.0) {
        return Err(Error::invalid("energy r does not match the trace's r"));
    }
    let mut warning = match variant {
        EnergyVariant::DiscreteR { .. } if !(r > 1.0) => return Err(Error::invalid("discrete energy needs r > 1")),
        EnergyVariant::DiscreteR { .. } if r < 3.0 => Some("discrete energy is nonincreasing only for r >= 3"),
        EnergyVariant::DiscreteT3 { .. } if r < 4.5 => Some("cubic-rate energy assumes r >= 9/2"),
        _ => None,
    };
    if !trace.restart_indices().is_empty() {
        warning = Some("trace contains restarts; energy index uses k, not the counter");
    }
    let ys = reconstruct_y(trace)?;
    let s = trace.params.step;
    let mut values = Vec::with_capacity(trace.len());
    for (k, y) in ys.iter().enumerate() {
        let x = trace.x(k).expect("iterates kept");
        let kf = k as f64;
        let gap = trace.records[k].f_gap;
        let e = match variant {
            EnergyVariant::DiscreteR { .. } => {
                let d: f64 = x
                    .iter()
                    .zip(y)
                    .zip(x_star)
                    .map(|((xi, yi), xs)| {
                        let z = ((kf + r - 1.0) * yi - kf * xi) / (r - 1.0);
                        (z - xs) * (z - xs)
                    })
                    .sum();
                2.0 * (kf + r - 2.0) * (kf + r - 2.0) * s / (r - 1.0) * gap + (r - 1.0) * d
            }
            _ => {
                let a = 2.0 * kf + 3.0 * r - 5.0;
                let d: f64 = x
                    .iter()
                    .zip(y)
                    .zip(x_star)
                    .map(|((xi, yi), xs)| {
                        let w = 2.0 * (kf + r - 1.0) * yi - (2.0 * kf + 1.0) * xi - (2.0 * r - 3.0) * xs;
                        w * w
                    })
                    .sum();
                s * a * (2.0 * kf + 2.0 * r - 5.0) * (4.0 * kf + 4.0 * r - 9.0) / 16.0 * gap + a / 16.0 * d
            }
        };
        values.push(e);
    }
    let grid = (0..trace.len()).map(|k| k as f64).collect();
    Ok(EnergySeries { variant, grid, values, warning })
}

/// `tᵖ·(f(X(t)) − f⋆)` per sample.
pub fn scaled_error_continuous(trace: &ContinuousTrace, power: f64) -> Result<Vec<f64>> {
    linalg::positive("power", power)?;
    Ok(trace.times.iter().zip(&trace.f_gap).map(|(t, g)| scale_gap(libm::pow(*t, power), *g)).collect())
}

/// `s^{p/2} kᵖ·(f(x_k) − f⋆)` per iteration, so `p = 2` gives `s k²·gap`.
pub fn scaled_error_discrete(trace: &IterateTrace, power: f64) -> Result<Vec<f64>> {
    linalg::positive("power", power)?;
    let s = libm::pow(trace.params.step, 0.5 * power);
    Ok(trace.records.iter().map(|r| scale_gap(s * libm::pow(r.k as f64, power), r.f_gap)).collect())
}

fn scale_gap(w: f64, g: f64) -> f64 {
    if g == 0.0 {
        0.0
    } else {
        w * g
    }
}

/// Times where coordinate `coord` of `X(t) − x⋆` changes sign, located by
/// linear interpolation.
///
/// Samples with `|X − x⋆| < 1e−13·|x0 − x⋆|` are treated as numerically zero
/// and skipped; a constant signal yields no roots.
pub fn oscillation_roots(trace: &ContinuousTrace, coord: usize, x_star: f64) -> Result<Vec<f64>> {
    if coord >= trace.dim() {
        return Err(Error::invalid(alloc::format!("coordinate {coord} out of range")));
    }
    let mut roots = Vec::new();
    if trace.is_empty() {
        return Ok(roots);
    }
    let scale = (trace.x(0)[coord] - x_star).abs();
    let floor = 1e-13 * scale;
    if scale == 0.0 {
        return Ok(roots);
    }
    let mut last: Option<(f64, f64)> = None;
    for i in 0..trace.len() {
        let e = trace.x(i)[coord] - x_star;
        if e.abs() < floor {
            continue;
        }
        let t = trace.times[i];
        if let Some((tp, ep)) = last {
            if (ep < 0.0) != (e < 0.0) {
                roots.push(tp + (t - tp) * ep / (ep - e));
            }
        }
        last = Some((t, e));
    }
    Ok(roots)
}

/// `max_{0 < u ≤ t_end} ‖Ẋ(u)‖/u` over the samples.
pub fn velocity_ratio_max(trace: &ContinuousTrace, t_end: f64) -> Result<f64> {
    if t_end > trace.horizon() * (1.0 + 1e-12) {
        return Err(Error::HorizonMismatch { needed: t_end, available: trace.horizon() });
    }
    let mut best = 0.0f64;
    for i in 0..trace.len() {
        let t = trace.times[i];
        if t > t_end * (1.0 + 1e-12) {
            break;
        }
        if t > 0.0 {
            best = best.max(trace.speed(i) / t);
        }
    }
    Ok(best)
}

/// `max_k ‖x_k − X(k√s)‖` over the whole scheme trace, with `X` linearly
/// interpolated between ODE samples.
pub fn scheme_ode_deviation(itrace: &IterateTrace, ctrace: &ContinuousTrace, s: f64) -> Result<f64> {
    linalg::positive("s", s)?;
    check_dim(ctrace.dim(), itrace.dim())?;
    if !itrace.has_iterates() {
        return Err(Error::invalid("scheme trace was recorded without iterates"));
    }
    let k_max = itrace.len() - 1;
    let needed = k_max as f64 * libm::sqrt(s);
    if needed > ctrace.horizon() * (1.0 + 1e-9) {
        return Err(Error::HorizonMismatch { needed, available: ctrace.horizon() });
    }
    let mut worst = 0.0f64;
    for k in 0..=k_max {
        let t = (k as f64 * libm::sqrt(s)).min(ctrace.horizon());
        let x_ode = ctrace.position_at(t).expect("inside the horizon");
        worst = worst.max(linalg::dist(itrace.x(k).expect("iterates kept"), &x_ode));
    }
    Ok(worst)
}

/// Least-squares line through `(k, log gap_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits `log(f_gap)` against `k` over the inclusive window `[k_lo, k_hi]`.
pub fn linear_rate_fit(trace: &IterateTrace, window: (usize, usize)) -> Result<RateFit> {
    let (lo, hi) = window;
    if lo >= hi || hi >= trace.len() {
        return Err(Error::invalid(alloc::format!("window {lo}..={hi} is not inside the trace")));
    }
    let mut ks = Vec::with_capacity(hi - lo + 1);
    let mut logs = Vec::with_capacity(hi - lo + 1);
    for rec in &trace.records[lo..=hi] {
        if !(rec.f_gap > 0.0) {
            return Err(Error::NonPositiveGap { index: rec.k });
        }
        ks.push(rec.k as f64);
        logs.push(libm::log(rec.f_gap));
    }
    Ok(fit_line(&ks, &logs))
}

/// Ordinary least squares `y ≈ slope·x + intercept` with its `R²`.
pub fn fit_line(x: &[f64], y: &[f64]) -> RateFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| { let e = b - slope * a - intercept; e * e }).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    RateFit { slope, intercept, r_squared }
}

/// `R²` of a quadratic least-squares fit of `log(f_gap)` against `k`.
pub fn quadratic_log_fit_r2(trace: &IterateTrace, window: (usize, usize)) -> Result<f64> {
    let (lo, hi) = window;
    if lo + 2 > hi || hi >= trace.len() {
        return Err(Error::invalid("window too short for a quadratic fit"));
    }
    let mut pts = Vec::with_capacity(hi - lo + 1);
    for rec in &trace.records[lo..=hi] {
        if !(rec.f_gap > 0.0) {
            return Err(Error::NonPositiveGap { index: rec.k });
        }
        pts.push((rec.k as f64, libm::log(rec.f_gap)));
    }
    // Center and scale k for a well-conditioned 3×3 normal system.
    let n = pts.len() as f64;
    let mk = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let sk = libm::sqrt(pts.iter().map(|p| (p.0 - mk) * (p.0 - mk)).sum::<f64>() / n).max(1e-300);
    let mut m = [[0.0f64; 4]; 3];
    for &(k, y) in &pts {
        let u = (k - mk) / sk;
        let basis = [1.0, u, u * u];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            m[i][3] += basis[i] * y;
        }
    }
    let c = solve3(m);
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sse, mut syy) = (0.0, 0.0);
    for &(k, y) in &pts {
        let u = (k - mk) / sk;
        let f = c[0] + c[1] * u + c[2] * u * u;
        sse += (y - f) * (y - f);
        syy += (y - my) * (y - my);
    }
    Ok(if syy == 0.0 { 1.0 } else { 1.0 - sse / syy })
}

fn solve3(mut m: [[f64; 4]; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).expect("nonempty");
        m.swap(col, piv);
        for row in (col + 1)..3 {
            let f = m[row][col] / m[col][col];
            for j in col..4 {
                m[row][j] -= f * m[col][j];
            }
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = ((i + 1)..3).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][3] - s) / m[i][i];
    }
    x
}

/// Indices `i` with `v[i−1] < v[i] ≥ v[i+1]` (interior samples only).
pub fn local_maxima(v: &[f64]) -> Vec<usize> {
    (1..v.len().saturating_sub(1)).filter(|&i| v[i - 1] < v[i] && v[i] >= v[i + 1]).collect()
}

/// Times of the "major" bumps: local maxima of the sequence of local maxima.
pub fn major_bump_times(times: &[f64], values: &[f64]) -> Vec<f64> {
    let peaks = local_maxima(values);
    let heights: Vec<f64> = peaks.iter().map(|&i| values[i]).collect();
    local_maxima(&heights).into_iter().map(|j| times[peaks[j]]).collect()
}

/// Mean spacing of consecutive entries; `None` for fewer than two.
pub fn mean_spacing(t: &[f64]) -> Option<f64> {
    (t.len() >= 2).then(|| (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64)
}

/// Trapezoidal `∫ y dt` over the samples.
pub fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2).zip(y.windows(2)).map(|(a, b)| 0.5 * (a[1] - a[0]) * (b[0] + b[1])).sum()
}

/// Running Cesàro mean `(1/t)∫₀ᵗ y du` at the last sample.
pub fn cesaro_mean(t: &[f64], y: &[f64]) -> f64 {
    match t.last() {
        Some(&end) if end > 0.0 => trapezoid(t, y) / end,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{CompositeObjective, Quadratic};
    use crate::schemes::{gradient_descent_run, Optimum};
    use alloc::vec;

    #[test]
    fn geometric_fit_is_exact() {
        let q = CompositeObjective::smooth(Quadratic::new(vec![1.0]).unwrap());
        // gap_k = ½·0.9^{2k}
        let t = gradient_descent_run(&q, &[1.0], 0.1, 200, Optimum::Known).unwrap();
        let fit = linear_rate_fit(&t, (0, 200)).unwrap();
        assert!((fit.slope - 2.0 * libm::log(0.9)).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(matches!(
            linear_rate_fit(&gradient_descent_run(&q, &[0.0], 0.1, 5, Optimum::Known).unwrap(), (0, 5)),
            Err(Error::NonPositiveGap { index: 0 })
        ));
    }

    #[test]
    fn majors_and_spacing() {
        let v = [0.0, 1.0, 0.0, 3.0, 0.0, 2.0, 0.0, 1.0, 0.0, 4.0, 0.0, 1.0, 0.0];
        let t: Vec<f64> = (0..v.len()).map(|i| i as f64).collect();
        assert_eq!(local_maxima(&v), vec![1, 3, 5, 7, 9, 11]);
        assert_eq!(major_bump_times(&t, &v), vec![3.0, 9.0]);
        assert_eq!(mean_spacing(&[3.0, 9.0]), Some(6.0));
    }

    #[test]
    fn quadrature() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let y: Vec<f64> = t.iter().map(|x| 2.0 * x).collect();
        assert!((trapezoid(&t, &y) - 1.0).abs() < 1e-14);
        assert!((cesaro_mean(&t, &y) - 1.0).abs() < 1e-14);
    }
}
