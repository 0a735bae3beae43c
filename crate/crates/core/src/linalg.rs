//! Dense row-major matrices and the handful of vector kernels the schemes need.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // Four independent accumulators let the loop vectorize; the order is fixed.
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(norm_sq(a))
}

/// Euclidean distance `‖a − b‖`.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `y ← y + alpha·x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn is_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Dense matrix stored row-major.
///
/// Matrices built by [`Matrix::new`] or [`Matrix::from_fn`] that are mostly
/// zero also carry a compressed-row index, which the products use instead of
/// the dense loops. Results agree with the dense path up to summation order.
#[derive(Debug, Clone)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    sparse: Option<Csr>,
}

#[derive(Debug, Clone)]
struct Csr {
    row_start: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

/// Density at or below which a compressed-row index is built.
const SPARSE_DENSITY: f64 = 0.25;
const SPARSE_MIN_ENTRIES: usize = 1024;

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(rows * cols, data.len())?;
        Ok(Matrix { rows, cols, data, sparse: None }.indexed())
    }

    fn indexed(mut self) -> Self {
        let n = self.data.len();
        if n < SPARSE_MIN_ENTRIES {
            return self;
        }
        let nnz = self.data.iter().filter(|v| **v != 0.0).count();
        if nnz as f64 > SPARSE_DENSITY * n as f64 {
            return self;
        }
        let mut csr = Csr { row_start: Vec::with_capacity(self.rows + 1), col: Vec::with_capacity(nnz), val: Vec::with_capacity(nnz) };
        csr.row_start.push(0);
        for i in 0..self.rows {
            for (j, &v) in self.row(i).iter().enumerate() {
                if v != 0.0 {
                    csr.col.push(j);
                    csr.val.push(v);
                }
            }
            csr.row_start.push(csr.col.len());
        }
        self.sparse = Some(csr);
        self
    }

    /// Whether products go through the compressed-row index.
    pub fn is_sparse(&self) -> bool {
        self.sparse.is_some()
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols], sparse: None }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data, sparse: None }.indexed()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.sparse = None;
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `out ← A x`
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        if let Some(csr) = &self.sparse {
            for (i, o) in out.iter_mut().enumerate() {
                let range = csr.row_start[i]..csr.row_start[i + 1];
                *o = csr.col[range.clone()].iter().zip(&csr.val[range]).map(|(&j, v)| v * x[j]).sum();
            }
            return;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut out);
        out
    }

    /// `out ← Aᵀ y`
    pub fn mul_t_vec_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|o| *o = 0.0);
        if let Some(csr) = &self.sparse {
            for (i, yi) in y.iter().enumerate() {
                let range = csr.row_start[i]..csr.row_start[i + 1];
                for (&j, v) in csr.col[range.clone()].iter().zip(&csr.val[range]) {
                    out[j] += yi * v;
                }
            }
            return;
        }
        for (i, yi) in y.iter().enumerate() {
            if *yi != 0.0 {
                axpy(*yi, self.row(i), out);
            }
        }
    }

    pub fn mul_t_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        self.mul_t_vec_into(y, &mut out);
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        check_dim(self.cols, other.rows)?;
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                axpy(a, other.row(k), dst);
            }
        }
        Ok(out)
    }

    /// Largest eigenvalue of `AᵀA` (the squared spectral norm), see [`power_iteration`].
    pub fn spectral_norm_sq(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        // Iterate on the smaller Gram matrix; both share the nonzero spectrum.
        if self.cols <= self.rows {
            let mut tmp = vec![0.0; self.rows];
            power_iteration(self.cols, |v, out| {
                self.mul_vec_into(v, &mut tmp);
                self.mul_t_vec_into(&tmp, out);
            })
        } else {
            let mut tmp = vec![0.0; self.cols];
            power_iteration(self.rows, |v, out| {
                self.mul_t_vec_into(v, &mut tmp);
                self.mul_vec_into(&tmp, out);
            })
        }
    }
}

/// Maximum number of power-iteration steps.
pub const POWER_MAX_ITERS: usize = 10_000;
/// Relative residual `‖Mv − ρv‖ ≤ tol·ρ` at which power iteration stops.
pub const POWER_TOL: f64 = 1e-12;

/// Largest eigenvalue of a symmetric positive semidefinite operator given by
/// its action `apply(v, out)`.
///
/// Starts from a fixed deterministic vector, so the result is reproducible.
pub fn power_iteration(n: usize, mut apply: impl FnMut(&[f64], &mut [f64])) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + libm::fmod(i as f64 * 0.618_033_988_749_895, 1.0)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut w = vec![0.0; n];
    let mut rho = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        apply(&v, &mut w);
        rho = dot(&v, &w);
        let resid = libm::sqrt(w.iter().zip(&v).map(|(wi, vi)| (wi - rho * vi) * (wi - rho * vi)).sum());
        let nw = norm(&w);
        if nw == 0.0 {
            return 0.0;
        }
        if resid <= POWER_TOL * rho.abs() {
            break;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / nw;
        }
    }
    rho
}

/// Thin singular value decomposition `A = U diag(σ) Vᵀ`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `m × k` with orthonormal columns (columns for zero singular values are zero).
    pub u: Matrix,
    pub sigma: Vec<f64>,
    /// `n × k` with orthonormal columns.
    pub v: Matrix,
}

const JACOBI_MAX_SWEEPS: usize = 60;

/// One-sided (Hestenes) Jacobi SVD. Intended for the small dense matrices of
/// the desk-scale problems.
pub fn svd(a: &Matrix) -> Svd {
    if a.rows < a.cols {
        let t = svd(&a.transpose());
        return Svd { u: t.v, sigma: t.sigma, v: t.u };
    }
    let (w, v) = jacobi_columns(a, true);
    let v = v.expect("requested");
    let (m, n) = (a.rows, a.cols);
    let mut sigma = vec![0.0; n];
    let mut u = Matrix::zeros(m, n);
    for j in 0..n {
        let s = libm::sqrt((0..m).map(|i| w.get(i, j) * w.get(i, j)).sum());
        sigma[j] = s;
        if s > 0.0 {
            for i in 0..m {
                u.set(i, j, w.get(i, j) / s);
            }
        }
    }
    Svd { u, sigma, v }
}

/// Orthogonalizes the columns of `a` (rows ≥ cols) by plane rotations, returning
/// `(A V, V)`; the columns of `A V` are mutually orthogonal with norms σ.
/// `V` is only accumulated when `want_v`.
pub(crate) fn jacobi_columns(a: &Matrix, want_v: bool) -> (Matrix, Option<Matrix>) {
    let (m, n) = (a.rows, a.cols);
    // Column-major working copies keep the rotations cache friendly.
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = if want_v {
        (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                e
            })
            .collect()
    } else {
        Vec::new()
    };
    // Columns below this squared norm are zero to working precision.
    let negligible = 1e-32 * w.iter().map(|c| norm_sq(c)).sum::<f64>();
    let mut norms = vec![0.0; n];
    for _ in 0..JACOBI_MAX_SWEEPS {
        // Squared norms are updated in closed form within a sweep and refreshed here.
        for (nj, c) in norms.iter_mut().zip(&w) {
            *nj = norm_sq(c);
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha.min(beta) <= negligible {
                    continue;
                }
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                let (lo, hi) = w.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
                if want_v {
                    let (lo, hi) = v.split_at_mut(q);
                    rotate(&mut lo[p], &mut hi[0], c, s);
                }
                norms[p] = alpha - t * gamma;
                norms[q] = beta + t * gamma;
            }
        }
        if !rotated {
            break;
        }
    }
    let wm = Matrix::from_fn(m, n, |i, j| w[j][i]);
    let vm = want_v.then(|| Matrix::from_fn(n, n, |i, j| v[j][i]));
    (wm, vm)
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let (a, b) = (*xi, *yi);
        *xi = c * a - s * b;
        *yi = s * a + c * b;
    }
}

pub(crate) fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(alloc::format!("{name} must be positive and finite, got {v}")))
    }
}
