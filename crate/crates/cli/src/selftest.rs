//! Invariant suite behind `selftest`: each row compares a measured quantity
//! with its bound.

use std::f64::consts::PI;
use std::time::Instant;

use nesterov_ode::analysis::{energy_continuous, energy_discrete, EnergyVariant};
use nesterov_ode::linalg;
use nesterov_ode::objectives::{make_standard_objectives, CompositeObjective, Huber, Quadratic};
use nesterov_ode::ode::{closed_form_trace, integrate};
use nesterov_ode::problems::{generate, reference_solve, REFERENCE_BUDGET};
use nesterov_ode::prox::proximal_subgradient;
use nesterov_ode::rng::Rng;
use nesterov_ode::schemes::{nesterov_run, nesterov_run_with_momentum, IterateTrace};
use nesterov_ode::special::{bessel_j1, bessel_jnu};
use nesterov_ode::{OdeParams, Optimum, ProblemName, ProblemSpec, ProxSpec, SchemeParams, Smooth};

pub struct Row {
    pub name: String,
    pub bound: String,
    pub measured: f64,
    pub pass: bool,
}

fn upper(name: impl Into<String>, limit: f64, measured: f64) -> Row {
    Row { name: name.into(), bound: format!("<= {limit:e}"), measured, pass: measured <= limit }
}

/// Momentum `(k − 1)/(k + r − 1)`, or `k/(k + r − 1)` with the injected fault.
struct Momentum {
    fault: bool,
}

impl Momentum {
    fn run<G: Smooth>(&self, obj: &CompositeObjective<G>, x0: &[f64], p: &SchemeParams, opt: Optimum) -> IterateTrace {
        let r = p.r;
        let shift = if self.fault { 0.0 } else { 1.0 };
        nesterov_run_with_momentum(obj, x0, p, opt, |k| (k as f64 - shift) / (k as f64 + r - 1.0))
            .expect("selftest parameters are valid")
    }
}

/// Worst `f_gap/bound` of the generalized-rate bound, and whether every
/// iterate satisfies `f_gap ≤ bound + 1e-12`.
fn certificate(trace: &IterateTrace, d0: f64) -> (f64, bool) {
    let (s, r) = (trace.params.step, trace.params.r);
    let mut worst = 0.0f64;
    let mut ok = true;
    for rec in &trace.records[1..] {
        let k = rec.k as f64;
        let bound = (r - 1.0) * (r - 1.0) * d0 / (2.0 * s * (k + r - 2.0) * (k + r - 2.0));
        worst = worst.max(rec.f_gap / bound);
        ok &= rec.f_gap <= bound + 1e-12;
    }
    (worst, ok)
}

fn all_prox() -> Vec<ProxSpec> {
    vec![
        ProxSpec::Zero,
        ProxSpec::L1 { lambda: 0.7 },
        ProxSpec::NonNeg,
        ProxSpec::L1Ball { radius: 1.5 },
        ProxSpec::Nuclear { lambda: 0.4, rows: 2, cols: 3 },
        ProxSpec::SortedL1 { weights: vec![2.0, 1.5, 1.0, 0.5, 0.5, 0.0] },
    ]
}

fn prox_rows(rng: &mut Rng) -> Vec<Row> {
    let mut ratio = 0.0f64;
    let mut violation = 0.0f64;
    let vec6 = |rng: &mut Rng| (0..6).map(|_| 3.0 * rng.gaussian()).collect::<Vec<f64>>();
    for h in all_prox() {
        for _ in 0..300 {
            let (u, v, s) = (vec6(rng), vec6(rng), rng.uniform_in(0.05, 4.0));
            let (pu, pv) = (h.prox(&u, s).unwrap(), h.prox(&v, s).unwrap());
            ratio = ratio.max(linalg::dist(&pu, &pv) / linalg::dist(&u, &v));
            let g: Vec<f64> = u.iter().zip(&pu).map(|(a, b)| (a - b) / s).collect();
            let w = match h {
                ProxSpec::NonNeg | ProxSpec::L1Ball { .. } => h.prox(&vec6(rng), 1.0).unwrap(),
                _ => vec6(rng),
            };
            let gap = h.value(&pu) + linalg::dot(&g, &linalg::sub(&w, &pu)) - h.value(&w);
            violation = violation.max(gap / (1.0 + h.value(&w).abs()));
        }
    }
    let mut l1_gap = 0.0f64;
    for _ in 0..300 {
        let (v, s) = (vec6(rng), rng.uniform_in(0.05, 4.0));
        let a = ProxSpec::SortedL1 { weights: vec![0.8; 6] }.prox(&v, s).unwrap();
        let b = ProxSpec::L1 { lambda: 0.8 }.prox(&v, s).unwrap();
        l1_gap = l1_gap.max(linalg::dist(&a, &b));
    }
    vec![
        upper("prox nonexpansive, max ‖Pu − Pv‖/‖u − v‖", 1.0 + 1e-10, ratio),
        upper("prox subgradient inequality, max violation", 1e-9, violation),
        upper("sorted l1 with equal weights vs l1", 1e-12, l1_gap),
    ]
}

fn bessel_rows() -> Vec<Row> {
    // Trapezoid rule over a full period, spectrally accurate for N ≫ u.
    let integral = |nu: f64, u: f64| {
        let n = 1024;
        let h = 2.0 * PI / n as f64;
        (0..n).map(|i| (nu * i as f64 * h - u * (i as f64 * h).sin()).cos()).sum::<f64>() * h / (2.0 * PI)
    };
    let mut dev = 0.0f64;
    for u in [0.01, 0.5, 2.0, 3.8317, 10.0, 50.0, 120.0] {
        dev = dev.max((bessel_j1(u) - integral(1.0, u)).abs());
        dev = dev.max((bessel_jnu(2.0, u) - integral(2.0, u)).abs());
    }
    let mut half = 0.0f64;
    for u in [0.1, 1.0, PI / 2.0, 7.0, 40.0, 90.0] {
        half = half.max((bessel_jnu(0.5, u) - (2.0 / (PI * u)).sqrt() * u.sin()).abs());
    }
    vec![upper("Bessel J1, J2 vs integral representation", 1e-10, dev), upper("Bessel J1/2 vs closed form", 1e-10, half)]
}

fn two_scale() -> Quadratic {
    Quadratic::new(vec![0.04, 0.01]).expect("positive eigenvalues")
}

fn ode_rows() -> Vec<Row> {
    let q = two_scale();
    let x0 = [1.0, 1.0];
    let exact = closed_form_trace(&q, &x0, 3.0, 1e-3, 50.0).expect("valid grid");
    let num = integrate(&q, &x0, &OdeParams::new(1e-3, 50.0), Optimum::Known).expect("stable step");
    let dev = (0..exact.len()).map(|i| linalg::dist(exact.x(i), num.x(i))).fold(0.0, f64::max);
    let trace = integrate(&q, &x0, &OdeParams::new(1e-3, 20.0), Optimum::Known).expect("stable step");
    let e = energy_continuous(&trace, &[0.0, 0.0], EnergyVariant::ContinuousR3).expect("matching dimension");
    vec![
        upper("closed form vs integrator, Δt = 1e-3, T = 50", 1e-3, dev),
        upper("continuous energy r = 3, relative increase", 1e-6, e.max_increase() / e.first()),
    ]
}

fn scheme_rows(m: &Momentum) -> Vec<Row> {
    let mut rows = Vec::new();

    let mut worst = 0.0f64;
    let mut ok = true;
    for entry in make_standard_objectives() {
        let obj = CompositeObjective::smooth((entry.build)(42));
        let x0 = vec![1.0; obj.dim()];
        let refr = reference_solve(&obj, &x0, REFERENCE_BUDGET).expect("catalog solves");
        let p = SchemeParams::new(1.0 / obj.lipschitz(), 10_000).keep_iterates(false);
        let (w, o) = certificate(&m.run(&obj, &x0, &p, Optimum::Value(refr.f_star)), linalg::dist(&x0, &refr.x_star).powi(2));
        worst = worst.max(w);
        ok &= o;
    }
    rows.push(Row { name: "rate certificate r = 3, catalog, max gap/bound".into(), bound: "<= 1".into(), measured: worst, pass: ok });

    let lasso = generate(&ProblemSpec::desk(ProblemName::Lasso)).expect("desk lasso");
    for r in [4.0, 5.0] {
        let p = SchemeParams::new(lasso.unit_step(), 10_000).with_r(r).keep_iterates(false);
        let (w, o) = certificate(&m.run(&lasso.objective, &lasso.x0, &p, lasso.optimum()), lasso.initial_distance_sq());
        rows.push(Row { name: format!("rate certificate r = {r}, desk lasso"), bound: "<= 1".into(), measured: w, pass: o });
    }

    let fixed = proximal_subgradient(&lasso.objective, &lasso.x_star, lasso.unit_step()).expect("matching dimension");
    rows.push(upper("‖G_s(x*)‖ at the desk lasso reference", 1e-8, linalg::norm(&fixed)));

    // s = δ puts the iterates on the quadratic piece, where the bound is nearly tight.
    let delta = 1e-3;
    let huber = CompositeObjective::smooth(Huber::new(1, delta).expect("positive delta"));
    let p = SchemeParams::new(delta, 20_000).keep_iterates(false);
    let (w, o) = certificate(&m.run(&huber, &[1.0], &p, Optimum::Known), 1.0);
    rows.push(Row { name: "rate certificate r = 3, smoothed |x| (tight)".into(), bound: "<= 1".into(), measured: w, pass: o });

    let quad = generate(&ProblemSpec::desk(ProblemName::Quadratic)).expect("desk quadratic");
    let p = SchemeParams::new(quad.unit_step(), 5_000).with_r(4.0);
    let trace = nesterov_run(&quad.objective, &quad.x0, &p, quad.optimum()).expect("valid step");
    let e = energy_discrete(&trace, &quad.x_star, EnergyVariant::DiscreteR { r: 4.0 }).expect("iterates kept");
    rows.push(upper("discrete energy r = 4, relative increase", 1e-10, e.max_increase() / e.first()));
    rows
}

/// Runs every invariant. `inject_momentum_fault` shifts the momentum
/// numerator by one, which the certificates must catch.
pub fn run(inject_momentum_fault: bool) -> Vec<Row> {
    let mut rng = Rng::new(7);
    let m = Momentum { fault: inject_momentum_fault };
    let mut rows = prox_rows(&mut rng);
    rows.extend(bessel_rows());
    rows.extend(ode_rows());
    rows.extend(scheme_rows(&m));
    rows
}

/// Prints the table; returns the number of failures.
pub fn report(inject_momentum_fault: bool) -> usize {
    let start = Instant::now();
    let rows = run(inject_momentum_fault);
    let width = rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
    println!("{:<width$}  {:<12}  {:<14}  status", "invariant", "bound", "measured");
    for r in &rows {
        let pad = width - r.name.chars().count();
        println!("{}{}  {:<12}  {:<14.6e}  {}", r.name, " ".repeat(pad), r.bound, r.measured, if r.pass { "PASS" } else { "FAIL" });
    }
    let failed: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    println!("{} of {} invariants passed in {:.1} s", rows.len() - failed.len(), rows.len(), start.elapsed().as_secs_f64());
    for f in &failed {
        println!("FAILED: {f}");
    }
    failed.len()
}
