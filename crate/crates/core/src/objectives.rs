//! Smooth convex objectives and the composite `g + h` wrapper.
//!
//! Every objective is immutable after construction. Lipschitz constants of
//! data-driven objectives come from [`Matrix::spectral_norm_sq`].

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, dot, Matrix};
use crate::prox::ProxSpec;

/// A convex, `L`-smooth function on `ℝⁿ`.
pub trait Smooth {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes `∇f(x)` into `out`; both slices have length [`Smooth::dim`].
    fn gradient_into(&self, x: &[f64], out: &mut [f64]);

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.gradient_into(x, &mut g);
        g
    }

    /// Lipschitz constant `L` of the gradient.
    fn lipschitz(&self) -> f64;

    /// Strong convexity modulus `μ`; `0` when not known to be strongly convex.
    fn strong_convexity(&self) -> f64 {
        0.0
    }

    /// `f(x) − f⋆` computed without cancellation, when the minimum is known in
    /// closed form.
    fn known_gap(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    /// Analytic minimizer, when known.
    fn known_minimizer(&self) -> Option<Vec<f64>> {
        None
    }
}

/// `f(x) = ½ Σ λᵢ xᵢ²`, the diagonalized quadratic with `f⋆ = 0` at `x⋆ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    eigenvalues: Vec<f64>,
}

/// The eigenvalue list that defines a [`Quadratic`].
pub type QuadraticSpec = Quadratic;

impl Quadratic {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::invalid("quadratic needs at least one eigenvalue"));
        }
        if let Some(bad) = eigenvalues.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::invalid(alloc::format!("eigenvalues must be positive, got {bad}")));
        }
        Ok(Quadratic { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

impl Smooth for Quadratic {
    fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.eigenvalues.iter().zip(x).map(|(l, xi)| l * xi * xi).sum::<f64>()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, l), xi) in out.iter_mut().zip(&self.eigenvalues).zip(x) {
            *o = l * xi;
        }
    }

    fn lipschitz(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::MIN, f64::max)
    }

    fn strong_convexity(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::MAX, f64::min)
    }

    fn known_gap(&self, x: &[f64]) -> Option<f64> {
        Some(self.value(x))
    }

    fn known_minimizer(&self) -> Option<Vec<f64>> {
        Some(vec![0.0; self.dim()])
    }
}

/// `f(x) = ½ xᵀAx + bᵀx` with `A = Qᵀ diag(λ) Q` positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseQuadratic {
    a: Matrix,
    b: Vec<f64>,
    x_star: Vec<f64>,
    f_star: f64,
    l: f64,
    mu: f64,
}

impl DenseQuadratic {
    /// Builds `A = Qᵀ diag(λ) Q` from an orthogonal `Q` and solves for `x⋆ = −A⁻¹b`
    /// through the same factorization.
    pub fn from_eigen(q: &Matrix, eigenvalues: &[f64], b: Vec<f64>) -> Result<Self> {
        let n = eigenvalues.len();
        check_dim(n, q.rows())?;
        check_dim(n, q.cols())?;
        check_dim(n, b.len())?;
        let diag = Quadratic::new(eigenvalues.to_vec())?;
        let scaled = Matrix::from_fn(n, n, |i, j| eigenvalues[i] * q.get(i, j));
        let a = q.transpose().matmul(&scaled)?;
        let a = Matrix::from_fn(n, n, |i, j| 0.5 * (a.get(i, j) + a.get(j, i)));
        let qb = q.mul_vec(&b);
        let w: Vec<f64> = qb.iter().zip(eigenvalues).map(|(v, l)| -v / l).collect();
        let x_star = q.mul_t_vec(&w);
        let f_star = 0.5 * dot(&b, &x_star);
        Ok(DenseQuadratic { a, b, x_star, f_star, l: diag.lipschitz(), mu: diag.strong_convexity() })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn linear(&self) -> &[f64] {
        &self.b
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.x_star
    }

    pub fn min_value(&self) -> f64 {
        self.f_star
    }
}

impl Smooth for DenseQuadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, &self.a.mul_vec(x)) + dot(&self.b, x)
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        self.a.mul_vec_into(x, out);
        linalg::axpy(1.0, &self.b, out);
    }

    fn lipschitz(&self) -> f64 {
        self.l
    }

    fn strong_convexity(&self) -> f64 {
        self.mu
    }

    fn known_gap(&self, x: &[f64]) -> Option<f64> {
        let d = linalg::sub(x, &self.x_star);
        Some(0.5 * dot(&d, &self.a.mul_vec(&d)))
    }

    fn known_minimizer(&self) -> Option<Vec<f64>> {
        Some(self.x_star.clone())
    }
}

/// `f(x) = c‖Ax − b‖²`; `c = ½` is the usual least squares, `c = 1` the NLS loss.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    a: Matrix,
    b: Vec<f64>,
    scale: f64,
    l: f64,
}

impl LeastSquares {
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self> {
        Self::with_scale(a, b, 0.5)
    }

    pub fn with_scale(a: Matrix, b: Vec<f64>, scale: f64) -> Result<Self> {
        check_dim(a.rows(), b.len())?;
        linalg::positive("scale", scale)?;
        let l = 2.0 * scale * a.spectral_norm_sq();
        Ok(LeastSquares { a, b, scale, l })
    }

    pub fn design(&self) -> &Matrix {
        &self.a
    }

    pub fn response(&self) -> &[f64] {
        &self.b
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `Ax − b`
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.a.mul_vec(x);
        linalg::axpy(-1.0, &self.b, &mut r);
        r
    }
}

impl Smooth for LeastSquares {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.scale * linalg::norm_sq(&self.residual(x))
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let mut r = self.residual(x);
        r.iter_mut().for_each(|v| *v *= 2.0 * self.scale);
        self.a.mul_t_vec_into(&r, out);
    }

    fn lipschitz(&self) -> f64 {
        self.l
    }
}

/// `f(x) = Σᵢ −yᵢ aᵢᵀx + log(1 + e^{aᵢᵀx})` with labels `yᵢ ∈ {0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Logistic {
    a: Matrix,
    y: Vec<f64>,
    l: f64,
}

impl Logistic {
    pub fn new(a: Matrix, y: Vec<f64>) -> Result<Self> {
        check_dim(a.rows(), y.len())?;
        if y.iter().any(|v| *v != 0.0 && *v != 1.0) {
            return Err(Error::invalid("logistic labels must be 0 or 1"));
        }
        let l = 0.25 * a.spectral_norm_sq();
        Ok(Logistic { a, y, l })
    }

    pub fn design(&self) -> &Matrix {
        &self.a
    }

    pub fn labels(&self) -> &[f64] {
        &self.y
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + libm::log1p(libm::exp(-z))
    } else {
        libm::log1p(libm::exp(z))
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

impl Smooth for Logistic {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let z = self.a.mul_vec(x);
        z.iter().zip(&self.y).map(|(zi, yi)| softplus(*zi) - yi * zi).sum()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let mut z = self.a.mul_vec(x);
        for (zi, yi) in z.iter_mut().zip(&self.y) {
            *zi = sigmoid(*zi) - yi;
        }
        self.a.mul_t_vec_into(&z, out);
    }

    fn lipschitz(&self) -> f64 {
        self.l
    }
}

/// `f(x) = ρ log Σᵢ exp((aᵢᵀx − bᵢ)/ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSumExp {
    a: Matrix,
    b: Vec<f64>,
    rho: f64,
    l: f64,
}

impl LogSumExp {
    pub fn new(a: Matrix, b: Vec<f64>, rho: f64) -> Result<Self> {
        check_dim(a.rows(), b.len())?;
        linalg::positive("rho", rho)?;
        let l = a.spectral_norm_sq() / rho;
        Ok(LogSumExp { a, b, rho, l })
    }

    pub fn design(&self) -> &Matrix {
        &self.a
    }

    pub fn offsets(&self) -> &[f64] {
        &self.b
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    fn scaled_logits(&self, x: &[f64]) -> Vec<f64> {
        let mut z = self.a.mul_vec(x);
        for (zi, bi) in z.iter_mut().zip(&self.b) {
            *zi = (*zi - bi) / self.rho;
        }
        z
    }
}

impl Smooth for LogSumExp {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let z = self.scaled_logits(x);
        let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = z.iter().map(|zi| libm::exp(zi - m)).sum();
        self.rho * (m + libm::log(s))
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let mut z = self.scaled_logits(x);
        let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        z.iter_mut().for_each(|zi| *zi = libm::exp(*zi - m));
        let s: f64 = z.iter().sum();
        z.iter_mut().for_each(|zi| *zi /= s);
        self.a.mul_t_vec_into(&z, out);
    }

    fn lipschitz(&self) -> f64 {
        self.l
    }
}

/// `f(X) = ½ Σ_{(i,j)∈Ω} (X_ij − M_ij)²` on a row-major `rows × cols` matrix.
///
/// The sampling operator is a coordinate projection, so `L = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedFrobenius {
    rows: usize,
    cols: usize,
    observed: Vec<(usize, f64)>,
}

impl MaskedFrobenius {
    /// `observed` holds `(row-major index, value)` pairs.
    pub fn new(rows: usize, cols: usize, mut observed: Vec<(usize, f64)>) -> Result<Self> {
        if let Some((i, _)) = observed.iter().find(|(i, _)| *i >= rows * cols) {
            return Err(Error::invalid(alloc::format!("observed index {i} outside {rows}x{cols}")));
        }
        observed.sort_by_key(|(i, _)| *i);
        if observed.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("observed indices must be distinct"));
        }
        Ok(MaskedFrobenius { rows, cols, observed })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn observed(&self) -> &[(usize, f64)] {
        &self.observed
    }
}

impl Smooth for MaskedFrobenius {
    fn dim(&self) -> usize {
        self.rows * self.cols
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.observed.iter().map(|(i, m)| (x[*i] - m) * (x[*i] - m)).sum::<f64>()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, m) in &self.observed {
            out[*i] = x[*i] - m;
        }
    }

    fn lipschitz(&self) -> f64 {
        1.0
    }
}

/// Coordinatewise Huber smoothing of `‖x‖₁`: `x²/(2δ)` for `|x| ≤ δ`, else `|x| − δ/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Huber {
    dim: usize,
    delta: f64,
}

impl Huber {
    pub fn new(dim: usize, delta: f64) -> Result<Self> {
        linalg::positive("delta", delta)?;
        Ok(Huber { dim, delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

impl Smooth for Huber {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .map(|v| {
                let a = v.abs();
                if a <= self.delta {
                    v * v / (2.0 * self.delta)
                } else {
                    a - 0.5 * self.delta
                }
            })
            .sum()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, v) in out.iter_mut().zip(x) {
            *o = (v / self.delta).clamp(-1.0, 1.0);
        }
    }

    fn lipschitz(&self) -> f64 {
        1.0 / self.delta
    }

    fn known_gap(&self, x: &[f64]) -> Option<f64> {
        Some(self.value(x))
    }

    fn known_minimizer(&self) -> Option<Vec<f64>> {
        Some(vec![0.0; self.dim])
    }
}

/// One-dimensional ramp: `f(x) = x` for `x ≥ c` and `x + κ(x − c)²/2` below `c`.
///
/// The minimizer is `x⋆ = c − 1/κ` with `f⋆ = c − 1/(2κ)`; `L = κ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRamp {
    cap: f64,
    kappa: f64,
}

impl LinearRamp {
    pub fn new(cap: f64, kappa: f64) -> Result<Self> {
        linalg::positive("kappa", kappa)?;
        if !cap.is_finite() {
            return Err(Error::invalid("ramp cap must be finite"));
        }
        Ok(LinearRamp { cap, kappa })
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn minimizer(&self) -> f64 {
        self.cap - 1.0 / self.kappa
    }
}

impl Smooth for LinearRamp {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &[f64]) -> f64 {
        let d = x[0] - self.cap;
        if d >= 0.0 {
            x[0]
        } else {
            x[0] + 0.5 * self.kappa * d * d
        }
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let d = x[0] - self.cap;
        out[0] = if d >= 0.0 { 1.0 } else { 1.0 + self.kappa * d };
    }

    fn lipschitz(&self) -> f64 {
        self.kappa
    }

    fn known_gap(&self, x: &[f64]) -> Option<f64> {
        let d = x[0] - self.cap;
        Some(if d >= 0.0 {
            d + 0.5 / self.kappa
        } else {
            let e = x[0] - self.minimizer();
            0.5 * self.kappa * e * e
        })
    }

    fn known_minimizer(&self) -> Option<Vec<f64>> {
        Some(vec![self.minimizer()])
    }
}

/// Closed set of the concrete objectives, usable where a single type is needed.
#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum StandardObjective {
    Quadratic(Quadratic),
    DenseQuadratic(DenseQuadratic),
    LeastSquares(LeastSquares),
    Logistic(Logistic),
    LogSumExp(LogSumExp),
    MaskedFrobenius(MaskedFrobenius),
    Huber(Huber),
    LinearRamp(LinearRamp),
}

macro_rules! dispatch {
    ($self:ident, $o:ident => $e:expr) => {
        match $self {
            StandardObjective::Quadratic($o) => $e,
            StandardObjective::DenseQuadratic($o) => $e,
            StandardObjective::LeastSquares($o) => $e,
            StandardObjective::Logistic($o) => $e,
            StandardObjective::LogSumExp($o) => $e,
            StandardObjective::MaskedFrobenius($o) => $e,
            StandardObjective::Huber($o) => $e,
            StandardObjective::LinearRamp($o) => $e,
        }
    };
}

impl Smooth for StandardObjective {
    fn dim(&self) -> usize {
        dispatch!(self, o => o.dim())
    }
    fn value(&self, x: &[f64]) -> f64 {
        dispatch!(self, o => o.value(x))
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        dispatch!(self, o => o.gradient_into(x, out))
    }
    fn lipschitz(&self) -> f64 {
        dispatch!(self, o => o.lipschitz())
    }
    fn strong_convexity(&self) -> f64 {
        dispatch!(self, o => o.strong_convexity())
    }
    fn known_gap(&self, x: &[f64]) -> Option<f64> {
        dispatch!(self, o => o.known_gap(x))
    }
    fn known_minimizer(&self) -> Option<Vec<f64>> {
        dispatch!(self, o => o.known_minimizer())
    }
}

macro_rules! from_variant {
    ($($t:ident),*) => {$(
        impl From<$t> for StandardObjective {
            fn from(o: $t) -> Self {
                StandardObjective::$t(o)
            }
        }
    )*};
}
from_variant!(Quadratic, DenseQuadratic, LeastSquares, Logistic, LogSumExp, MaskedFrobenius, Huber, LinearRamp);

/// `f = g + h` with smooth `g` and a prox-friendly `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeObjective<G = StandardObjective> {
    pub g: G,
    pub h: ProxSpec,
}

impl<G: Smooth> CompositeObjective<G> {
    pub fn new(g: G, h: ProxSpec) -> Result<Self> {
        h.check_dim(g.dim())?;
        Ok(CompositeObjective { g, h })
    }

    /// `g` alone, with `h = 0`.
    pub fn smooth(g: G) -> Self {
        CompositeObjective { g, h: ProxSpec::Zero }
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// `g(x) + h(x)`; `+∞` outside the domain of `h`.
    pub fn value(&self, x: &[f64]) -> f64 {
        let h = self.h.value(x);
        if h == f64::INFINITY {
            return h;
        }
        self.g.value(x) + h
    }

    /// Exact `f(x) − f⋆` when `h = 0` and `g` knows its minimum.
    pub fn known_gap(&self, x: &[f64]) -> Option<f64> {
        match self.h {
            ProxSpec::Zero => self.g.known_gap(x),
            _ => None,
        }
    }

    pub fn lipschitz(&self) -> f64 {
        self.g.lipschitz()
    }
}

/// Anything that can be evaluated at a point of known dimension.
pub trait Evaluate {
    fn eval_dim(&self) -> usize;
    fn eval_unchecked(&self, x: &[f64]) -> f64;
}

impl<T: Smooth> Evaluate for T {
    fn eval_dim(&self) -> usize {
        self.dim()
    }
    fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.value(x)
    }
}

impl<G: Smooth> Evaluate for CompositeObjective<G> {
    fn eval_dim(&self) -> usize {
        self.dim()
    }
    fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.value(x)
    }
}

/// `f(x)`, checking the dimension of `x`.
pub fn eval<O: Evaluate + ?Sized>(obj: &O, x: &[f64]) -> Result<f64> {
    check_dim(obj.eval_dim(), x.len())?;
    Ok(obj.eval_unchecked(x))
}

/// `∇f(x)`, checking the dimension of `x`.
pub fn grad<G: Smooth + ?Sized>(obj: &G, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(obj.dim(), x.len())?;
    Ok(obj.gradient(x))
}

/// A named constructor in the catalog returned by [`make_standard_objectives`].
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Builds a small deterministic instance from a seed.
    pub build: fn(u64) -> StandardObjective,
}

/// The analytic objective families with small seeded instances.
///
/// Larger experiment instances live in [`crate::problems`].
pub fn make_standard_objectives() -> Vec<CatalogEntry> {
    use crate::rng::Rng;

    fn gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize, sd: f64) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| sd * rng.gaussian())
    }

    vec![
        CatalogEntry {
            name: "quadratic",
            description: "½ Σ λᵢxᵢ² with λ uniform in [0.01, 1], n = 5",
            build: |seed| {
                let mut rng = Rng::fork(seed, 0x51);
                let l: Vec<f64> = (0..5).map(|_| rng.uniform_in(0.01, 1.0)).collect();
                Quadratic::new(l).expect("positive eigenvalues").into()
            },
        },
        CatalogEntry {
            name: "least-squares",
            description: "½‖Ax − b‖², A 8×5 standard Gaussian, b ~ N(0, 1)",
            build: |seed| {
                let mut rng = Rng::fork(seed, 0x52);
                let a = gaussian_matrix(&mut rng, 8, 5, 1.0);
                let b = (0..8).map(|_| rng.gaussian()).collect();
                LeastSquares::new(a, b).expect("consistent shapes").into()
            },
        },
        CatalogEntry {
            name: "logistic",
            description: "logistic loss, A 12×5 standard Gaussian, labels from a logistic model",
            build: |seed| {
                let mut rng = Rng::fork(seed, 0x53);
                let a = gaussian_matrix(&mut rng, 12, 5, 1.0);
                let truth: Vec<f64> = (0..5).map(|_| rng.gaussian()).collect();
                let y = (0..12)
                    .map(|i| if rng.uniform() < sigmoid(dot(a.row(i), &truth)) { 1.0 } else { 0.0 })
                    .collect();
                Logistic::new(a, y).expect("binary labels").into()
            },
        },
        CatalogEntry {
            name: "log-sum-exp",
            description: "ρ log Σ exp((aᵢᵀx − bᵢ)/ρ), n = 5, m = 20, ρ = 20",
            build: |seed| {
                let mut rng = Rng::fork(seed, 0x54);
                let a = gaussian_matrix(&mut rng, 20, 5, 1.0);
                let b = (0..20).map(|_| rng.normal(0.0, libm::sqrt(2.0))).collect();
                LogSumExp::new(a, b, 20.0).expect("positive rho").into()
            },
        },
    ]
}

/// Display name for diagnostics.
pub fn kind_name(obj: &StandardObjective) -> String {
    let s = match obj {
        StandardObjective::Quadratic(_) => "quadratic",
        StandardObjective::DenseQuadratic(_) => "dense-quadratic",
        StandardObjective::LeastSquares(_) => "least-squares",
        StandardObjective::Logistic(_) => "logistic",
        StandardObjective::LogSumExp(_) => "log-sum-exp",
        StandardObjective::MaskedFrobenius(_) => "masked-frobenius",
        StandardObjective::Huber(_) => "huber",
        StandardObjective::LinearRamp(_) => "linear-ramp",
    };
    String::from(s)
}
