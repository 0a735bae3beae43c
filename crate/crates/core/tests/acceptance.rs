//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line with
//! the measured quantity, its bound and the wall time against its budget.
//!
//! Runs without the libtest harness so the lines are always visible.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nesterov_ode::analysis::{
    energy_continuous, energy_discrete, linear_rate_fit, major_bump_times, mean_spacing, oscillation_roots,
    scaled_error_continuous, scaled_error_discrete, scheme_ode_deviation, EnergyVariant,
};
use nesterov_ode::linalg::{self, Matrix};
use nesterov_ode::objectives::{
    make_standard_objectives, DenseQuadratic, Huber, LinearRamp, Quadratic, Smooth, StandardObjective,
};
use nesterov_ode::ode::{closed_form_trace, integrate, integrate_composite_lasso, quadratic_closed_form, OdeParams};
use nesterov_ode::problems::{generate, random_orthogonal, reference_solve, ProblemName, ProblemSpec, REFERENCE_BUDGET};
use nesterov_ode::prox::{project_l1_ball, sorted_l1_prox};
use nesterov_ode::rng::Rng;
use nesterov_ode::schemes::{nesterov_run, speed_restart_run, IterateTrace, Optimum, SchemeParams};
use nesterov_ode::{CompositeObjective, Error, ProxSpec};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "rate certificate, r = 3, s = 1/L", budget: secs(10), check: rate_certificate },
        Criterion { id: 2, name: "generalized rate, r = 4 and 5", budget: secs(10), check: generalized_rate },
        Criterion { id: 3, name: "closed form vs integrator, major cycle", budget: secs(5), check: closed_form_vs_integrator },
        Criterion { id: 4, name: "scheme converges to the ODE", budget: secs(10), check: scheme_to_ode },
        Criterion { id: 5, name: "phase transition at r = 3", budget: secs(20), check: phase_transition },
        Criterion { id: 6, name: "energy monotonicity", budget: secs(10), check: energy_monotonicity },
        Criterion { id: 7, name: "oscillation root spacing", budget: secs(5), check: oscillation },
        Criterion { id: 8, name: "tightness anchor", budget: secs(2), check: tightness },
        Criterion { id: 9, name: "speed restarting, linear rate", budget: secs(10), check: speed_restarting },
        Criterion { id: 10, name: "restart-time lower bound", budget: secs(10), check: restart_time },
        Criterion { id: 11, name: "cubic normalization, r = 5", budget: secs(10), check: cubic_normalization },
        Criterion { id: 12, name: "prox oracle equivalence", budget: secs(5), check: prox_oracles },
        Criterion { id: 13, name: "composite ODE rate and lasso overlay", budget: secs(10), check: composite_ode },
        Criterion { id: 14, name: "Euler stability threshold", budget: secs(2), check: stability },
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.contains(&c.id)) {
        let start = Instant::now();
        let outcome = (c.check)();
        let elapsed = start.elapsed();
        let over = elapsed > c.budget;
        let (ok, detail) = match outcome {
            Ok(d) if !over => (true, d),
            Ok(d) => (false, format!("{d}; over time budget")),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:>2} {:<40} {} [{:.2} s / {} s]",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fail(e: Error) -> String {
    format!("error: {e}")
}

fn two_scale() -> Quadratic {
    Quadratic::new(vec![0.04, 0.01]).unwrap()
}

/// Largest `f_gap(k)·(k+1)²·s/(2‖x0 − x⋆‖²)`; at most one when the bound holds.
fn certificate_ratio(trace: &IterateTrace, s: f64, d0: f64, slack: f64) -> (f64, bool) {
    let mut worst = 0.0f64;
    let mut ok = true;
    for r in &trace.records[1..] {
        let bound = 2.0 * d0 / (s * ((r.k + 1) as f64).powi(2));
        ok &= r.f_gap <= bound + slack;
        worst = worst.max(r.f_gap / bound);
    }
    (worst, ok)
}

fn rate_certificate() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut check = |name: &str, obj: &CompositeObjective, x0: &[f64], x_star: &[f64], opt: Optimum| -> Result<(), String> {
        let s = 1.0 / obj.lipschitz();
        let params = SchemeParams::new(s, 10_000).keep_iterates(false);
        let trace = nesterov_run(obj, x0, &params, opt).map_err(fail)?;
        let d0 = linalg::dist(x0, x_star).powi(2);
        let (ratio, ok) = certificate_ratio(&trace, s, d0, 1e-12);
        worst = worst.max(ratio);
        count += 1;
        ensure(ok, || format!("{name}: bound violated, worst ratio {ratio:.4}"))
    };
    for entry in make_standard_objectives() {
        let g = (entry.build)(42);
        let obj = CompositeObjective::smooth(g);
        let x0 = vec![1.0; obj.dim()];
        let r = reference_solve(&obj, &x0, REFERENCE_BUDGET).map_err(fail)?;
        let opt = if obj.known_gap(&x0).is_some() { Optimum::Known } else { Optimum::Value(r.f_star) };
        check(entry.name, &obj, &x0, &r.x_star, opt)?;
    }
    for &name in ProblemName::ALL {
        let inst = generate(&ProblemSpec::desk(name)).map_err(fail)?;
        check(name.as_str(), &inst.objective, &inst.x0, &inst.x_star, inst.optimum())?;
    }
    Ok(format!("{count} instances, max f_gap/bound = {worst:.4} <= 1"))
}

fn generalized_rate() -> Outcome {
    let inst = generate(&ProblemSpec::desk(ProblemName::Lasso)).map_err(fail)?;
    let s = inst.unit_step();
    let d0 = inst.initial_distance_sq();
    let mut parts = Vec::new();
    for r in [4.0, 5.0] {
        let params = SchemeParams::new(s, 10_000).with_r(r).keep_iterates(false);
        let trace = nesterov_run(&inst.objective, &inst.x0, &params, inst.f_star).map_err(fail)?;
        let mut worst = 0.0f64;
        let mut sum = 0.0;
        for rec in &trace.records[1..] {
            let k = rec.k as f64;
            let bound = (r - 1.0).powi(2) * d0 / (2.0 * s * (k + r - 2.0).powi(2));
            ensure(rec.f_gap <= bound + 1e-12, || format!("r = {r}: first inequality fails at k = {}", rec.k))?;
            worst = worst.max(rec.f_gap / bound);
            sum += (k + r - 1.0) * rec.f_gap;
        }
        let sum_bound = (r - 1.0).powi(2) * d0 / (2.0 * s * (r - 3.0));
        ensure(sum <= sum_bound, || format!("r = {r}: summed bound {sum:.4e} > {sum_bound:.4e}"))?;
        parts.push(format!("r={r}: gap/bound {worst:.3}, sum/bound {:.3}", sum / sum_bound));
    }
    Ok(parts.join("; "))
}

fn closed_form_vs_integrator() -> Outcome {
    let q = two_scale();
    let x0 = [1.0, 1.0];
    let trace = integrate(&q, &x0, &OdeParams::new(1e-3, 50.0), Optimum::Known).map_err(fail)?;
    let mut dev = 0.0f64;
    for i in 0..trace.len() {
        let exact = quadratic_closed_form(&q, &x0, trace.times[i], 3.0).map_err(fail)?;
        dev = dev.max(linalg::dist(trace.x(i), &exact));
    }
    ensure(dev <= 1e-3, || format!("max deviation {dev:.3e} > 1e-3"))?;

    // Major bumps of t³·f_gap (the decay-compensated gap) over four cycles.
    let long = integrate(&q, &x0, &OdeParams::new(1e-3, 200.0).with_sample_every(10), Optimum::Known).map_err(fail)?;
    let scaled = scaled_error_continuous(&long, 3.0).map_err(fail)?;
    let majors = major_bump_times(&long.times, &scaled);
    let spacing = mean_spacing(&majors).ok_or("fewer than two major bumps")?;
    let target = 10.0 * std::f64::consts::PI;
    let rel = (spacing - target).abs() / target;
    ensure(rel <= 0.05, || format!("major cycle {spacing:.3} vs 10π, off by {:.1}%", 100.0 * rel))?;
    Ok(format!("max deviation {dev:.2e} <= 1e-3; major cycle {spacing:.3} (10π ± {:.1}%)", 100.0 * rel))
}

fn scheme_to_ode() -> Outcome {
    let q = two_scale();
    let obj = CompositeObjective::smooth(q.clone());
    let x0 = [1.0, 1.0];
    let horizon = 10.0;
    let exact = closed_form_trace(&q, &x0, 3.0, 1e-3, horizon).map_err(fail)?;
    let mut devs = Vec::new();
    for s in [1e-2, 1e-3, 1e-4] {
        let k_max = (horizon / f64::sqrt(s)).round() as usize;
        let trace = nesterov_run(&obj, &x0, &SchemeParams::new(s, k_max), Optimum::Known).map_err(fail)?;
        devs.push(scheme_ode_deviation(&trace, &exact, s).map_err(fail)?);
    }
    ensure(devs[1] < devs[0] && devs[2] < devs[1], || format!("not decreasing: {devs:?}"))?;
    ensure(devs[2] <= 0.05, || format!("D(1e-4) = {:.3e} > 0.05", devs[2]))?;
    Ok(format!("D = {:.3e}, {:.3e}, {:.3e}", devs[0], devs[1], devs[2]))
}

/// Max of `values` over samples with `grid ∈ [lo, hi]`.
fn window_max(grid: &[f64], values: &[f64], lo: f64, hi: f64) -> f64 {
    grid.iter().zip(values).filter(|(g, _)| **g >= lo && **g <= hi).map(|(_, v)| *v).fold(0.0, f64::max)
}

fn phase_transition() -> Outcome {
    let half = Quadratic::new(vec![1.0]).unwrap();
    let period = std::f64::consts::PI;

    // r = 1: compare the oscillation envelope (max over a half period) at t = 100 and t = 10.
    let low = integrate(&half, &[1.0], &OdeParams::new(1e-3, 100.0).with_r(1.0), Optimum::Known).map_err(fail)?;
    let sc = scaled_error_continuous(&low, 2.0).map_err(fail)?;
    let at10 = window_max(&low.times, &sc, 10.0 - period / 2.0, 10.0);
    let at100 = window_max(&low.times, &sc, 100.0 - period / 2.0, 100.0);
    ensure(at100 >= 2.0 * at10, || format!("r = 1: envelope {at100:.3} at t=100 < 2 × {at10:.3}"))?;

    // r = 3: sup t²·f_gap ≤ 2.1‖x0 − x⋆‖².
    let classic = integrate(&half, &[1.0], &OdeParams::new(1e-3, 100.0), Optimum::Known).map_err(fail)?;
    let sup3 = scaled_error_continuous(&classic, 2.0).map_err(fail)?.into_iter().fold(0.0, f64::max);
    ensure(sup3 <= 2.1, || format!("r = 3: sup t²f_gap = {sup3:.4} > 2.1"))?;

    // r = 2, 2.5 on smoothed |x|: decade maxima of s·k²·f_gap increase.
    let abs = CompositeObjective::smooth(Huber::new(1, 1e-6).map_err(fail)?);
    let mut env = Vec::new();
    for r in [2.0, 2.5] {
        let params = SchemeParams::new(1e-8, 100_000).with_r(r).keep_iterates(false);
        let trace = nesterov_run(&abs, &[1.0], &params, Optimum::Known).map_err(fail)?;
        let sc = scaled_error_discrete(&trace, 2.0).map_err(fail)?;
        let ks: Vec<f64> = (0..sc.len()).map(|k| k as f64).collect();
        let decades: Vec<f64> = [(1e2, 1e3), (1e3, 1e4), (1e4, 1e5)].iter().map(|&(a, b)| window_max(&ks, &sc, a, b)).collect();
        ensure(decades.windows(2).all(|w| w[1] > w[0]), || format!("r = {r}: decade maxima {decades:?} not increasing"))?;
        env.push(format!("r={r}: {:.2e}->{:.2e}", decades[0], decades[2]));
    }
    Ok(format!(
        "r=1 envelope x{:.1}; r=3 sup {sup3:.4} <= 2.1; {}",
        at100 / at10,
        env.join(", ")
    ))
}

fn energy_monotonicity() -> Outcome {
    let mut worst_cont = 0.0f64;
    let mut worst_disc = 0.0f64;
    let mut smooth: Vec<(String, StandardObjective)> = vec![("two-scale".into(), two_scale().into())];
    smooth.extend(make_standard_objectives().into_iter().map(|e| (e.name.to_string(), (e.build)(42))));
    for (name, g) in &smooth {
        let obj = CompositeObjective::smooth(g.clone());
        let x0 = vec![1.0; obj.dim()];
        let r = reference_solve(&obj, &x0, REFERENCE_BUDGET).map_err(fail)?;
        let opt = if g.known_gap(&x0).is_some() { Optimum::Known } else { Optimum::Value(r.f_star) };
        for variant in [EnergyVariant::ContinuousR3, EnergyVariant::ContinuousR { r: 4.0 }, EnergyVariant::ContinuousR { r: 5.0 }] {
            let rr = match variant {
                EnergyVariant::ContinuousR { r } => r,
                _ => 3.0,
            };
            let trace = integrate(g, &x0, &OdeParams::new(1e-3, 20.0).with_r(rr), opt).map_err(fail)?;
            let e = energy_continuous(&trace, &r.x_star, variant).map_err(fail)?;
            let rel = e.max_increase() / e.first();
            worst_cont = worst_cont.max(rel);
            ensure(rel <= 1e-6, || format!("{name} {variant:?}: increase {rel:.3e}·E(0)"))?;
        }
        let s = 1.0 / obj.lipschitz();
        for variant in [EnergyVariant::DiscreteR { r: 4.0 }, EnergyVariant::DiscreteR { r: 5.0 }, EnergyVariant::DiscreteT3 { r: 5.0 }] {
            let rr = match variant {
                EnergyVariant::DiscreteR { r } | EnergyVariant::DiscreteT3 { r } => r,
                _ => unreachable!(),
            };
            if matches!(variant, EnergyVariant::DiscreteT3 { .. }) && g.strong_convexity() <= 0.0 {
                continue;
            }
            let trace = nesterov_run(&obj, &x0, &SchemeParams::new(s, 2000).with_r(rr), opt).map_err(fail)?;
            let e = energy_discrete(&trace, &r.x_star, variant).map_err(fail)?;
            let rel = e.max_increase() / e.first();
            worst_disc = worst_disc.max(rel);
            ensure(rel <= 1e-10, || format!("{name} {variant:?}: increase {rel:.3e}·E(0)"))?;
        }
    }
    Ok(format!(
        "{} objectives; worst continuous increase {worst_cont:.1e}·E(0), discrete {worst_disc:.1e}·E(0)",
        smooth.len()
    ))
}

fn oscillation() -> Outcome {
    let mu = 0.04;
    let q = Quadratic::new(vec![mu]).unwrap();
    let trace = integrate(&q, &[1.0], &OdeParams::new(1e-3, 250.0), Optimum::Known).map_err(fail)?;
    let roots = oscillation_roots(&trace, 0, 0.0).map_err(fail)?;
    ensure(roots.len() >= 10, || format!("only {} roots", roots.len()))?;
    let mut t = vec![0.0];
    t.extend_from_slice(&roots[..10]);
    let upper = 7.6635 / mu.sqrt();
    let lower = std::f64::consts::PI / mu.sqrt();
    let max_gap = t.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let min_pair = roots[..10].windows(3).map(|w| w[2] - w[0]).fold(f64::INFINITY, f64::min);
    ensure(max_gap < upper, || format!("gap {max_gap:.3} >= {upper:.3}"))?;
    ensure(min_pair > lower, || format!("two-gap {min_pair:.3} <= {lower:.3}"))?;
    Ok(format!("max gap {max_gap:.3} < {upper:.3}; min two-gap {min_pair:.3} > {lower:.3}"))
}

fn tightness() -> Outcome {
    let ramp = LinearRamp::new(0.0, 1e3).map_err(fail)?;
    let trace = integrate(&ramp, &[1.0], &OdeParams::new(1e-3, 6.0), Optimum::Known).map_err(fail)?;
    let sc = scaled_error_continuous(&trace, 2.0).map_err(fail)?;
    let (i, sup) = sc.iter().enumerate().fold((0, 0.0), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    let t_at = trace.times[i];
    ensure((sup - 2.0).abs() <= 0.1, || format!("sup t²f_gap = {sup:.4}, not 2 ± 5%"))?;
    ensure((t_at - 2.0).abs() <= 0.1, || format!("attained at t = {t_at:.3}, not near 2"))?;
    Ok(format!("sup t²f_gap = {sup:.4} at t = {t_at:.3} (2x0² = 2 at 2√x0 = 2)"))
}

fn speed_restarting() -> Outcome {
    let inst = generate(&ProblemSpec::desk(ProblemName::Quadratic)).map_err(fail)?;
    let s = inst.unit_step();
    let params = SchemeParams::new(s, 5000).keep_iterates(false);
    let sr = speed_restart_run(&inst.objective, &inst.x0, &params, Optimum::Known).map_err(fail)?;
    let plain = nesterov_run(&inst.objective, &inst.x0, &params, Optimum::Known).map_err(fail)?;
    let hit = sr.records.iter().find(|r| r.f_gap <= 1e-10).map(|r| r.k);
    let hit = hit.ok_or_else(|| format!("speed restart did not reach 1e-10, final {:.3e}", sr.records[5000].f_gap))?;
    let fit = linear_rate_fit(&sr, (100, 2000)).map_err(fail)?;
    ensure(fit.r_squared >= 0.9 && fit.slope < 0.0, || format!("fit R² {:.3}, slope {:.3e}", fit.r_squared, fit.slope))?;
    let sr_final = sr.records[5000].f_gap.max(f64::MIN_POSITIVE);
    let plain_final = plain.records[5000].f_gap;
    ensure(plain_final >= 10.0 * sr_final, || format!("plain {plain_final:.3e} < 10 × restarted {sr_final:.3e}"))?;
    Ok(format!(
        "1e-10 reached at k = {hit}; R² = {:.4}; at k = 5000 plain {plain_final:.2e} vs restarted {sr_final:.2e}",
        fit.r_squared
    ))
}

fn restart_time() -> Outcome {
    let mut rng = Rng::new(2024);
    let dt = 1e-3;
    let mut worst = f64::INFINITY;
    let mut bound_at = 0.0;
    for _ in 0..20 {
        let n = 10;
        let q = random_orthogonal(&mut rng, n);
        let mut eig: Vec<f64> = (0..n).map(|_| rng.uniform_in(0.01, 1.0)).collect();
        let l = rng.uniform_in(0.5, 4.0);
        eig[0] = l;
        let b: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
        let obj = DenseQuadratic::from_eigen(&q, &eig, b).map_err(fail)?;
        let x0: Vec<f64> = (0..n).map(|_| rng.normal(0.0, 3.0)).collect();
        let trace = integrate(&obj, &x0, &OdeParams::new(dt, 20.0).with_restart(true), Optimum::Known).map_err(fail)?;
        let t1 = *trace.restart_times.first().ok_or("no restart within the horizon")?;
        let bound = 4.0 / (5.0 * l.sqrt()) - 2.0 * dt;
        ensure(t1 >= bound, || format!("first restart {t1:.4} < {bound:.4} (L = {l:.3})"))?;
        if t1 - bound < worst {
            worst = t1 - bound;
            bound_at = bound;
        }
    }
    Ok(format!("20 quadratics; tightest margin {worst:.3} above bound {bound_at:.3}"))
}

fn cubic_normalization() -> Outcome {
    let inst = generate(&ProblemSpec::desk(ProblemName::Quadratic)).map_err(fail)?;
    let s = inst.unit_step();
    let mu = inst.objective.g.strong_convexity();
    let params = SchemeParams::new(s, 100_000).with_r(5.0).keep_iterates(false);
    let trace = nesterov_run(&inst.objective, &inst.x0, &params, Optimum::Known).map_err(fail)?;
    let sc: Vec<f64> = scaled_error_discrete(&trace, 3.0).map_err(fail)?.into_iter().map(|v| v * mu.sqrt()).collect();
    let ks: Vec<f64> = (0..sc.len()).map(|k| k as f64).collect();
    let first = window_max(&ks, &sc, 1.0, 10.0);
    let last = window_max(&ks, &sc, 1e4, 1e5);
    let peak = sc.iter().copied().fold(0.0, f64::max);
    ensure(peak.is_finite(), || "unbounded".into())?;
    ensure(last <= 1.1 * first, || format!("last decade {last:.3e} > 1.1 × first decade {first:.3e}"))?;
    Ok(format!("first decade {first:.3e}, last decade {last:.3e}, overall max {peak:.3e}"))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn sorted_l1_value(z: &[f64], w: &[f64]) -> f64 {
    let mut a: Vec<f64> = z.iter().map(|v| v.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    a.iter().zip(w).map(|(x, l)| x * l).sum()
}

/// Exhaustive oracle: for every ordering of |z| and every split into tied
/// blocks, the block value is `(mean(|v| − λ))₊`; the best feasible candidate
/// by direct evaluation is the prox.
fn sorted_l1_oracle(v: &[f64], w: &[f64]) -> Vec<f64> {
    let p = v.len();
    let objective = |z: &[f64]| 0.5 * linalg::dist(z, v).powi(2) + sorted_l1_value(z, w);
    let mut best = vec![0.0; p];
    let mut best_f = objective(&best);
    for perm in permutations(p) {
        for mask in 0..(1u32 << (p - 1)) {
            let mut z = vec![0.0; p];
            let mut start = 0;
            for end in 1..=p {
                if end == p || mask & (1 << (end - 1)) != 0 {
                    let m = (start..end).map(|i| v[perm[i]].abs() - w[i]).sum::<f64>() / (end - start) as f64;
                    for &idx in &perm[start..end] {
                        z[idx] = m.max(0.0) * v[idx].signum();
                    }
                    start = end;
                }
            }
            let f = objective(&z);
            if f < best_f {
                best_f = f;
                best = z;
            }
        }
    }
    best
}

/// Exhaustive oracle over supports: `z_S = v_S − θ·sgn(v_S)` with θ fixing
/// `‖z‖₁ = δ`; the nearest feasible candidate is the projection.
fn l1_ball_oracle(v: &[f64], radius: f64) -> Vec<f64> {
    if v.iter().map(|x| x.abs()).sum::<f64>() <= radius {
        return v.to_vec();
    }
    let p = v.len();
    let mut best = vec![0.0; p];
    let mut best_d = linalg::dist(&best, v);
    for mask in 1..(1u32 << p) {
        let support: Vec<usize> = (0..p).filter(|i| mask & (1 << i) != 0).collect();
        let theta = (support.iter().map(|&i| v[i].abs()).sum::<f64>() - radius) / support.len() as f64;
        let mut z = vec![0.0; p];
        let mut feasible = true;
        for &i in &support {
            let m = v[i].abs() - theta;
            feasible &= m >= 0.0;
            z[i] = m * v[i].signum();
        }
        if feasible {
            let d = linalg::dist(&z, v);
            if d < best_d {
                best_d = d;
                best = z;
            }
        }
    }
    best
}

fn prox_oracles() -> Outcome {
    let mut rng = Rng::new(7);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let p = 1 + rng.below(6);
        let v: Vec<f64> = (0..p).map(|_| rng.normal(0.0, 2.0)).collect();
        let mut w: Vec<f64> = (0..p).map(|_| rng.uniform_in(0.0, 2.0)).collect();
        w.sort_by(|a, b| b.total_cmp(a));
        let fast = sorted_l1_prox(&v, &w);
        let oracle = sorted_l1_oracle(&v, &w);
        let d = linalg::dist(&fast, &oracle);
        worst = worst.max(d);
        ensure(d <= 1e-6, || format!("case {case}: sorted-l1 off by {d:.3e}"))?;

        let radius = rng.uniform_in(0.1, 4.0);
        let fast = project_l1_ball(&v, radius);
        let oracle = l1_ball_oracle(&v, radius);
        let d = linalg::dist(&fast, &oracle);
        worst = worst.max(d);
        ensure(d <= 1e-6, || format!("case {case}: l1-ball off by {d:.3e}"))?;
    }
    Ok(format!("50 cases, max distance to oracle {worst:.2e} <= 1e-6"))
}

fn composite_ode() -> Outcome {
    let inst = generate(&ProblemSpec::desk(ProblemName::Lasso)).map_err(fail)?;
    let (a, y, lambda) = lasso_parts(&inst.objective)?;
    let d0 = inst.initial_distance_sq();
    let trace = integrate_composite_lasso(a, y, lambda, &inst.x0, &OdeParams::new(2e-4, 50.0), inst.f_star).map_err(fail)?;
    let sc = scaled_error_continuous(&trace, 2.0).map_err(fail)?;
    let sup = window_max(&trace.times, &sc, 1.0, 50.0);
    ensure(sup <= 2.0 * d0 * 1.05, || format!("sup t²f_gap = {sup:.4e} > 2.1‖x0 − x⋆‖² = {:.4e}", 2.1 * d0))?;

    // The small lasso: scheme at k = ⌈t/√s⌉ against the ODE at t.
    let small = generate(&ProblemSpec::desk(ProblemName::TinyLasso)).map_err(fail)?;
    let (a, y, lambda) = lasso_parts(&small.objective)?;
    let s: f64 = 1e-4;
    let ode = integrate_composite_lasso(a, y, lambda, &small.x0, &OdeParams::new(1e-4, 3.1), small.f_star).map_err(fail)?;
    let k_max = (3.0 / s.sqrt()).ceil() as usize;
    let scheme = nesterov_run(&small.objective, &small.x0, &SchemeParams::new(s, k_max), small.f_star).map_err(fail)?;
    let mut worst = 0.0f64;
    for t in [1.0, 2.0, 3.0] {
        let k = (t / s.sqrt()).ceil() as usize;
        let d = linalg::dist(scheme.x(k).unwrap(), &ode.position_at(t).unwrap());
        worst = worst.max(d);
    }
    ensure(worst <= 0.1, || format!("overlay deviation {worst:.3e} > 0.1"))?;
    Ok(format!("sup t²f_gap/‖x0 − x⋆‖² = {:.4} <= 2.1; overlay deviation {worst:.2e} <= 0.1", sup / d0))
}

fn lasso_parts(obj: &CompositeObjective) -> Result<(&Matrix, &[f64], f64), String> {
    match (&obj.g, &obj.h) {
        (StandardObjective::LeastSquares(ls), ProxSpec::L1 { lambda }) if ls.scale() == 0.5 => {
            Ok((ls.design(), ls.response(), *lambda))
        }
        _ => Err("not a lasso instance".into()),
    }
}

fn stability() -> Outcome {
    let q = two_scale();
    let l = q.lipschitz();
    let dt = 0.9 * 2.0 / l.sqrt();
    let ok = integrate(&q, &[1.0, 1.0], &OdeParams::new(dt, 100.0 * dt), Optimum::Known);
    let survived = ok.as_ref().map(|t| t.x(t.len() - 1).iter().all(|v| v.is_finite())).unwrap_or(false);
    ensure(survived, || format!("Δt = 0.9·2/√L failed: {:?}", ok.err()))?;

    let big_l = 4.0;
    let f = Quadratic::new(vec![big_l]).unwrap();
    let dt = 2.5 / big_l.sqrt();
    match integrate(&f, &[1.0], &OdeParams::new(dt, 1000.0 * dt), Optimum::Known) {
        Err(Error::OdeDivergence { t }) => Ok(format!("finite at 0.9·2/√L over 100 steps; divergence at 2.5/√L raised at t = {t:.1}")),
        Err(e) => Err(format!("unexpected error {e}")),
        Ok(_) => Err("Δt = 2.5/√L did not diverge".into()),
    }
}
