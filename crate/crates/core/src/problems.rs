//! Seeded generators for the experiment instances, at desk or full scale,
//! together with the reference solve that supplies `f⋆`.
//!
//! Every generator draws from its own ChaCha stream of the given seed, so an
//! instance depends only on `(name, scale, seed)`. Starting points are the
//! origin unless noted.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::objectives::{
    CompositeObjective, DenseQuadratic, Huber, LeastSquares, LinearRamp, LogSumExp, Logistic, MaskedFrobenius,
    Quadratic, Smooth, StandardObjective,
};
use crate::prox::{proximal_subgradient, ProxSpec};
use crate::rng::Rng;
use crate::special::normal_quantile;

/// Default seed for every generator.
pub const DEFAULT_SEED: u64 = 42;

macro_rules! problem_names {
    ($($v:ident => $s:literal, $suite:literal, $desc:literal;)*) => {
        /// Named experiment instances.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum ProblemName { $($v),* }

        impl ProblemName {
            pub const ALL: &'static [ProblemName] = &[$(ProblemName::$v),*];

            pub fn as_str(self) -> &'static str {
                match self { $(ProblemName::$v => $s),* }
            }

            /// The experiment group the instance belongs to.
            pub fn suite(self) -> &'static str {
                match self { $(ProblemName::$v => $suite),* }
            }

            pub fn description(self) -> &'static str {
                match self { $(ProblemName::$v => $desc),* }
            }
        }

        impl FromStr for ProblemName {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($s => Ok(ProblemName::$v),)*
                    _ => Err(Error::UnknownProblem(String::from(s))),
                }
            }
        }
    };
}

problem_names! {
    ScalarQuadratic => "scalar-quadratic", "ode", "f = x²/2, x0 = 1";
    TwoScaleQuadratic => "two-scale-quadratic", "ode", "f = 0.02x₁² + 0.005x₂², x0 = (1, 1)";
    AbsSmoothed => "abs-smoothed", "ode", "Huber-smoothed |x| with δ = 1e-6, x0 = 1";
    LinearRamp => "linear-ramp", "anchor", "f = x for x ≥ 0, quadratic cap below, ε = 1e-3, x0 = 1";
    TinyLasso => "tiny-lasso", "composite-ode", "½‖y − Ax‖² + ‖x‖₁, y = (4, 2, 0), x0 = (2, 0)";
    LassoFat => "lasso-fat", "restart-a", "lasso, Gaussian fat design, b ~ N(0, 25), λ = 4";
    LassoSquare => "lasso-square", "restart-a", "lasso, Gaussian square design, b ~ N(0, 9), λ = 4";
    NlsFat => "nls-fat", "restart-a", "‖Ax − b‖² with x ≥ 0, same data as lasso-fat";
    NlsSparse => "nls-sparse", "restart-a", "‖Ax − b‖² with x ≥ 0, 10% sparse column-normalized design";
    Logistic => "logistic", "restart-a", "logistic regression, Gaussian design";
    L1Logistic => "l1-logistic", "restart-a", "ℓ1-regularized logistic regression, λ = 5";
    Quadratic => "quadratic", "restart-b", "½xᵀAx + bᵀx, eigenvalues in [0.001, 1], b ~ N(0, 25)";
    LogSumExp => "log-sum-exp", "restart-b", "ρ log Σ exp((aᵢᵀx − bᵢ)/ρ), ρ = 20, b ~ N(0, 2)";
    MatrixCompletion => "matrix-completion", "restart-b", "½‖X_obs − M_obs‖² + λ‖X‖_*, 10% observed, λ = 0.05";
    L1ConstrainedLasso => "l1-constrained-lasso", "restart-b", "½‖Ax − b‖² s.t. ‖x‖₁ ≤ ‖x⁰‖₁, sparse design";
    Slope => "slope", "restart-b", "½‖Ax − b‖² + Σ λᵢ|x|₍ᵢ₎, λᵢ = 1.1Φ⁻¹(1 − 0.05i/(2p))";
    Lasso => "lasso", "restart-b", "½‖Ax − b‖² + λ‖x‖₁, λ = 1.5√(2 log p)";
    L1LogisticRestart => "l1-logistic-restart", "restart-b", "ℓ1-regularized logistic regression, as l1-logistic";
    SparseLogistic => "sparse-logistic", "restart-b", "logistic regression, dense stand-in for the large sparse design";
}

impl fmt::Display for ProblemName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scale {
    #[default]
    Desk,
    Paper,
}

impl Scale {
    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Desk => "desk",
            Scale::Paper => "paper",
        }
    }
}

impl FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            _ => Err(Error::invalid(format!("unknown scale `{s}` (expected desk or paper)"))),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemSpec {
    pub name: ProblemName,
    pub scale: Scale,
    pub seed: u64,
}

impl ProblemSpec {
    pub fn new(name: ProblemName, scale: Scale, seed: u64) -> Self {
        ProblemSpec { name, scale, seed }
    }

    pub fn desk(name: ProblemName) -> Self {
        ProblemSpec::new(name, Scale::Desk, DEFAULT_SEED)
    }
}

/// A generated instance with its reference optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub spec: ProblemSpec,
    pub objective: CompositeObjective,
    pub x0: Vec<f64>,
    pub f_star: f64,
    pub x_star: Vec<f64>,
    /// The optimum is analytic or the reference solve met its tolerance.
    pub confident: bool,
}

impl ProblemInstance {
    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    /// `‖x0 − x⋆‖²`
    pub fn initial_distance_sq(&self) -> f64 {
        let d = linalg::dist(&self.x0, &self.x_star);
        d * d
    }

    /// `s = 1/L` of the smooth part.
    pub fn unit_step(&self) -> f64 {
        1.0 / self.objective.lipschitz()
    }

    /// The gap reference to hand to the schemes and integrators: the exact gap
    /// when the objective knows it, the cached `f⋆` otherwise.
    pub fn optimum(&self) -> crate::schemes::Optimum {
        if self.objective.known_gap(&self.x0).is_some() {
            crate::schemes::Optimum::Known
        } else {
            crate::schemes::Optimum::Value(self.f_star)
        }
    }
}

/// Result of [`reference_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub f_star: f64,
    pub x_star: Vec<f64>,
    pub confident: bool,
    pub iterations: usize,
}

/// Default iteration budget of the reference solve.
pub const REFERENCE_BUDGET: usize = 1_000_000;
/// Stopping tolerance on `‖G_s(x)‖`, relative to `max(1, ‖G_s(x0)‖)`.
pub const REFERENCE_TOL: f64 = 1e-13;

/// Minimizes `obj` with the speed-restarted scheme (`s = 1/L`, `k_min = 10`)
/// until `‖G_s(x_k)‖ ≤ 1e-13·max(1, ‖G_s(x0)‖)` or `budget` iterations.
///
/// Objectives with a closed-form minimizer return it directly. A certified
/// iterate is returned with `f⋆` the least value seen; without certification
/// the best point seen is returned and flagged as not confident.
pub fn reference_solve<G: Smooth>(obj: &CompositeObjective<G>, x0: &[f64], budget: usize) -> Result<Reference> {
    crate::error::check_dim(obj.dim(), x0.len())?;
    if obj.h == ProxSpec::Zero {
        if let Some(x) = obj.g.known_minimizer() {
            return Ok(Reference { f_star: obj.value(&x), x_star: x, confident: true, iterations: 0 });
        }
    }
    let s = 1.0 / obj.lipschitz();
    let k_min = 10;
    let g0 = linalg::norm(&proximal_subgradient(obj, x0, s)?);
    let tol = REFERENCE_TOL * g0.max(1.0);

    let n = x0.len();
    let mut x_prev = x0.to_vec();
    let mut y = x0.to_vec();
    let mut grad = vec![0.0; n];
    let mut best_x = x0.to_vec();
    let mut best_f = obj.value(x0);
    let mut step_prev = 0.0;
    let mut j = 1usize;
    let mut confident = g0 <= tol;
    let mut k = 0;
    while k < budget && !confident {
        k += 1;
        obj.g.gradient_into(&y, &mut grad);
        let x = crate::prox::prox_point(obj, &y, &grad, s)?;
        if !linalg::is_finite(&x) {
            return Err(Error::Divergence { iteration: k });
        }
        let f = obj.value(&x);
        if f < best_f {
            best_f = f;
            best_x.copy_from_slice(&x);
        }
        let step = linalg::dist(&x, &x_prev);
        let beta = (j as f64 - 1.0) / (j as f64 + 2.0);
        for ((yi, xi), xp) in y.iter_mut().zip(&x).zip(&x_prev) {
            *yi = xi + beta * (xi - xp);
        }
        j = if step < step_prev && j >= k_min { 1 } else { j + 1 };
        step_prev = step;
        x_prev = x;
        // Near the optimum f is flat to rounding, so certify the current iterate.
        if k % 10 == 0 && linalg::norm(&proximal_subgradient(obj, &x_prev, s)?) <= tol {
            confident = true;
            best_f = best_f.min(obj.value(&x_prev));
            best_x.copy_from_slice(&x_prev);
        }
    }
    Ok(Reference { f_star: best_f, x_star: best_x, confident, iterations: k })
}

/// Builds the instance and runs the reference solve with the default budget.
pub fn generate(spec: &ProblemSpec) -> Result<ProblemInstance> {
    generate_with_budget(spec, REFERENCE_BUDGET)
}

pub fn generate_with_budget(spec: &ProblemSpec, budget: usize) -> Result<ProblemInstance> {
    let (objective, x0) = build(spec)?;
    let reference = reference_solve(&objective, &x0, budget)?;
    Ok(ProblemInstance {
        spec: *spec,
        objective,
        x0,
        f_star: reference.f_star,
        x_star: reference.x_star,
        confident: reference.confident,
    })
}

/// Dimensions used at each scale, as `(rows, cols)` of the design or `(n, 0)`.
pub fn dimensions(name: ProblemName, scale: Scale) -> (usize, usize) {
    use ProblemName::*;
    let desk = matches!(scale, Scale::Desk);
    let pick = |d: (usize, usize), p: (usize, usize)| if desk { d } else { p };
    match name {
        ScalarQuadratic | AbsSmoothed | LinearRamp => (1, 0),
        TwoScaleQuadratic => (2, 0),
        TinyLasso => (3, 2),
        LassoFat | NlsFat => pick((10, 50), (100, 500)),
        LassoSquare => pick((50, 50), (500, 500)),
        NlsSparse => pick((100, 1000), (1000, 10000)),
        Logistic => pick((50, 10), (500, 100)),
        L1Logistic | L1LogisticRestart => pick((20, 100), (200, 1000)),
        Quadratic => pick((50, 0), (500, 0)),
        LogSumExp => pick((20, 5), (200, 50)),
        MatrixCompletion => pick((30, 30), (300, 300)),
        L1ConstrainedLasso => pick((100, 1000), (5000, 50000)),
        Slope => pick((100, 1000), (1000, 10000)),
        Lasso => pick((100, 50), (1000, 500)),
        SparseLogistic => pick((200, 50), (10_000_000, 20000)),
    }
}

fn gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize, sd: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| sd * rng.gaussian())
}

/// Entries nonzero with probability `density`, Gaussian with deviation `sd`.
fn sparse_gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize, density: f64, sd: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| if rng.uniform() < density { sd * rng.gaussian() } else { 0.0 })
}

fn normalize_columns(a: &Matrix) -> Matrix {
    let norms: Vec<f64> = (0..a.cols()).map(|j| linalg::norm(&a.column(j))).collect();
    Matrix::from_fn(a.rows(), a.cols(), |i, j| if norms[j] > 0.0 { a.get(i, j) / norms[j] } else { 0.0 })
}

fn gaussian_vec(rng: &mut Rng, n: usize, sd: f64) -> Vec<f64> {
    (0..n).map(|_| sd * rng.gaussian()).collect()
}

/// `k`-sparse vector with nonzeros drawn by `draw`, at uniformly random positions.
fn sparse_vec(rng: &mut Rng, n: usize, k: usize, mut draw: impl FnMut(&mut Rng) -> f64) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for i in rng.sample_indices(n, k) {
        x[i] = draw(rng);
    }
    x
}

/// `b = A x⁰ + z` with standard Gaussian noise `z`.
fn noisy_response(rng: &mut Rng, a: &Matrix, truth: &[f64]) -> Vec<f64> {
    let mut b = a.mul_vec(truth);
    b.iter_mut().for_each(|v| *v += rng.gaussian());
    b
}

/// Labels `yᵢ ~ Bernoulli(1/(1 + e^{−aᵢᵀx⁰}))`.
fn logistic_labels(rng: &mut Rng, a: &Matrix, truth: &[f64]) -> Vec<f64> {
    (0..a.rows())
        .map(|i| {
            let z = linalg::dot(a.row(i), truth);
            if rng.uniform() < 1.0 / (1.0 + libm::exp(-z)) {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// `n × n` orthogonal matrix from Gram–Schmidt (applied twice) on a Gaussian matrix.
pub fn random_orthogonal(rng: &mut Rng, n: usize) -> Matrix {
    orthonormal_columns(rng, n, n)
}

/// `rows × cols` matrix with orthonormal columns (`cols ≤ rows`).
pub fn orthonormal_columns(rng: &mut Rng, rows: usize, cols: usize) -> Matrix {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(cols);
    while q.len() < cols {
        let mut v: Vec<f64> = (0..rows).map(|_| rng.gaussian()).collect();
        for _ in 0..2 {
            for u in &q {
                let c = linalg::dot(u, &v);
                linalg::axpy(-c, u, &mut v);
            }
        }
        let nv = linalg::norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            q.push(v);
        }
    }
    Matrix::from_fn(rows, cols, |i, j| q[j][i])
}

/// Builds the objective and starting point without solving for `f⋆`.
pub fn build(spec: &ProblemSpec) -> Result<(CompositeObjective, Vec<f64>)> {
    use ProblemName as P;
    let (rows, cols) = dimensions(spec.name, spec.scale);
    // One stream per data set; variants on the same data share it.
    let family = match spec.name {
        P::NlsFat => P::LassoFat,
        P::L1LogisticRestart => P::L1Logistic,
        other => other,
    };
    let mut rng = Rng::fork(spec.seed, family as u64 + 1);
    let smooth = |g: StandardObjective| CompositeObjective::smooth(g);
    let composite = |g: StandardObjective, h: ProxSpec| CompositeObjective::new(g, h);

    Ok(match spec.name {
        P::ScalarQuadratic => (smooth(Quadratic::new(vec![1.0])?.into()), vec![1.0]),
        P::TwoScaleQuadratic => (smooth(Quadratic::new(vec![0.04, 0.01])?.into()), vec![1.0, 1.0]),
        P::AbsSmoothed => (smooth(Huber::new(1, 1e-6)?.into()), vec![1.0]),
        P::LinearRamp => (smooth(LinearRamp::new(0.0, 1e3)?.into()), vec![1.0]),
        P::TinyLasso => {
            let a = Matrix::new(3, 2, vec![0.0, 1.0, 2.0, 1.0, 4.0, 1.0])?;
            let g = LeastSquares::new(a, vec![4.0, 2.0, 0.0])?;
            (composite(g.into(), ProxSpec::L1 { lambda: 1.0 })?, vec![2.0, 0.0])
        }
        P::LassoFat | P::NlsFat => {
            let a = gaussian_matrix(&mut rng, rows, cols, 1.0);
            let b = gaussian_vec(&mut rng, rows, 5.0);
            let obj = if spec.name == P::LassoFat {
                composite(LeastSquares::new(a, b)?.into(), ProxSpec::L1 { lambda: 4.0 })?
            } else {
                composite(LeastSquares::with_scale(a, b, 1.0)?.into(), ProxSpec::NonNeg)?
            };
            (obj, vec![0.0; cols])
        }
        P::LassoSquare => {
            let a = gaussian_matrix(&mut rng, rows, cols, 1.0);
            let b = gaussian_vec(&mut rng, rows, 3.0);
            (composite(LeastSquares::new(a, b)?.into(), ProxSpec::L1 { lambda: 4.0 })?, vec![0.0; cols])
        }
        P::NlsSparse => {
            let a = normalize_columns(&sparse_gaussian_matrix(&mut rng, rows, cols, 0.1, 1.0));
            let truth = sparse_vec(&mut rng, cols, cols / 100, |_| 4.0);
            let b = noisy_response(&mut rng, &a, &truth);
            (composite(LeastSquares::with_scale(a, b, 1.0)?.into(), ProxSpec::NonNeg)?, vec![0.0; cols])
        }
        P::Logistic => {
            let a = gaussian_matrix(&mut rng, rows, cols, 1.0);
            let truth = gaussian_vec(&mut rng, cols, 0.1);
            let y = logistic_labels(&mut rng, &a, &truth);
            (smooth(Logistic::new(a, y)?.into()), vec![0.0; cols])
        }
        P::L1Logistic | P::L1LogisticRestart => {
            let a = gaussian_matrix(&mut rng, rows, cols, 1.0);
            let truth = sparse_vec(&mut rng, cols, cols / 100, |r| 15.0 * r.gaussian());
            let y = logistic_labels(&mut rng, &a, &truth);
            (composite(Logistic::new(a, y)?.into(), ProxSpec::L1 { lambda: 5.0 })?, vec![0.0; cols])
        }
        P::Quadratic => {
            let n = rows;
            let q = random_orthogonal(&mut rng, n);
            let mut eig: Vec<f64> = (0..n).map(|_| rng.uniform_in(0.001, 1.0)).collect();
            eig[0] = 0.001;
            eig[n - 1] = 1.0;
            let b = gaussian_vec(&mut rng, n, 5.0);
            (smooth(DenseQuadratic::from_eigen(&q, &eig, b)?.into()), vec![0.0; n])
        }
        P::LogSumExp => {
            let a = gaussian_matrix(&mut rng, rows, cols, 1.0);
            let b = gaussian_vec(&mut rng, rows, libm::sqrt(2.0));
            (smooth(LogSumExp::new(a, b, 20.0)?.into()), vec![0.0; cols])
        }
        P::MatrixCompletion => {
            let rank = if spec.scale == Scale::Desk { 2 } else { 5 };
            let u = orthonormal_columns(&mut rng, rows, rank);
            let v = orthonormal_columns(&mut rng, cols, rank);
            let m = Matrix::from_fn(rows, cols, |i, j| (0..rank).map(|l| (l + 1) as f64 * u.get(i, l) * v.get(j, l)).sum());
            let observed: Vec<(usize, f64)> = (0..rows * cols)
                .filter_map(|idx| (rng.uniform() < 0.1).then_some((idx, m.data()[idx])))
                .collect();
            let g = MaskedFrobenius::new(rows, cols, observed)?;
            (composite(g.into(), ProxSpec::Nuclear { lambda: 0.05, rows, cols })?, vec![0.0; rows * cols])
        }
        P::L1ConstrainedLasso => {
            let density = if spec.scale == Scale::Desk { 0.05 } else { 0.005 };
            let a = sparse_gaussian_matrix(&mut rng, rows, cols, density, 0.2);
            let truth = sparse_vec(&mut rng, cols, cols / 200, |r| 5.0 * r.gaussian());
            let b = noisy_response(&mut rng, &a, &truth);
            let radius = truth.iter().map(|v| v.abs()).sum::<f64>();
            (composite(LeastSquares::new(a, b)?.into(), ProxSpec::L1Ball { radius })?, vec![0.0; cols])
        }
        P::Slope => {
            let a = gaussian_matrix(&mut rng, rows, cols, 1.0);
            let truth = sparse_vec(&mut rng, cols, cols / 500, |r| 5.0 * r.gaussian());
            let b = noisy_response(&mut rng, &a, &truth);
            (composite(LeastSquares::new(a, b)?.into(), ProxSpec::SortedL1 { weights: slope_weights(cols) })?, vec![0.0; cols])
        }
        P::Lasso => {
            let a = gaussian_matrix(&mut rng, rows, cols, 1.0);
            let truth = sparse_vec(&mut rng, cols, (cols / 25).max(1), |r| 5.0 * r.gaussian());
            let b = noisy_response(&mut rng, &a, &truth);
            let lambda = 1.5 * libm::sqrt(2.0 * libm::log(cols as f64));
            (composite(LeastSquares::new(a, b)?.into(), ProxSpec::L1 { lambda })?, vec![0.0; cols])
        }
        P::SparseLogistic => {
            if spec.scale == Scale::Paper {
                return Err(Error::invalid("sparse-logistic has no paper-scale instance (dense stand-in only)"));
            }
            let a = gaussian_matrix(&mut rng, rows, cols, 1.0);
            let truth = gaussian_vec(&mut rng, cols, 0.5);
            let y = logistic_labels(&mut rng, &a, &truth);
            (smooth(Logistic::new(a, y)?.into()), vec![0.0; cols])
        }
    })
}

/// `λᵢ = 1.1 Φ⁻¹(1 − 0.05 i/(2p))`, `i = 1..p`.
pub fn slope_weights(p: usize) -> Vec<f64> {
    (1..=p).map(|i| 1.1 * normal_quantile(1.0 - 0.05 * i as f64 / (2.0 * p as f64))).collect()
}
