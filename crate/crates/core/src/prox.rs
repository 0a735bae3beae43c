//! Proximal operators, the proximal subgradient `G_s`, and the lasso
//! directional subgradient that drives the composite ODE.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Matrix};
use crate::objectives::{CompositeObjective, Smooth};

/// The nonsmooth part `h` of a composite objective.
#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum ProxSpec {
    /// `h = 0`
    Zero,
    /// `h(x) = λ‖x‖₁`
    L1 { lambda: f64 },
    /// Indicator of the nonnegative orthant.
    NonNeg,
    /// Indicator of `{‖x‖₁ ≤ radius}`.
    L1Ball { radius: f64 },
    /// `h(X) = λ‖X‖_*` on a row-major `rows × cols` matrix.
    Nuclear { lambda: f64, rows: usize, cols: usize },
    /// `h(x) = Σᵢ wᵢ |x|₍ᵢ₎` with `w₁ ≥ … ≥ w_p ≥ 0` and `|x|₍₁₎ ≥ … ≥ |x|₍ₚ₎`.
    SortedL1 { weights: Vec<f64> },
}

/// Feasibility slack for the set indicators, relative to the set's scale.
const FEASIBILITY_SLACK: f64 = 1e-12;

impl ProxSpec {
    /// Checks the parameter invariants of the variant.
    pub fn validate(&self) -> Result<()> {
        match self {
            ProxSpec::Zero | ProxSpec::NonNeg => Ok(()),
            ProxSpec::L1 { lambda } | ProxSpec::Nuclear { lambda, .. } => {
                if *lambda >= 0.0 && lambda.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("penalty must be nonnegative, got {lambda}")))
                }
            }
            ProxSpec::L1Ball { radius } => linalg::positive("l1-ball radius", *radius).map(|_| ()),
            ProxSpec::SortedL1 { weights } => {
                if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
                    return Err(Error::invalid("sorted-l1 weights must be nonnegative"));
                }
                if weights.windows(2).any(|w| w[0] < w[1]) {
                    return Err(Error::invalid("sorted-l1 weights must be nonincreasing"));
                }
                Ok(())
            }
        }
    }

    /// Validates the parameters and the dimension `n` of the argument.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        self.validate()?;
        match self {
            ProxSpec::Nuclear { rows, cols, .. } => check_dim(rows * cols, n),
            ProxSpec::SortedL1 { weights } => check_dim(weights.len(), n),
            _ => Ok(()),
        }
    }

    /// `h(x)`, with `+∞` outside the domain of an indicator.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            ProxSpec::Zero => 0.0,
            ProxSpec::L1 { lambda } => lambda * l1_norm(x),
            ProxSpec::NonNeg => {
                if x.iter().all(|v| *v >= 0.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ProxSpec::L1Ball { radius } => {
                if l1_norm(x) <= radius * (1.0 + FEASIBILITY_SLACK) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ProxSpec::Nuclear { lambda, rows, cols } => {
                let m = Matrix::new(*rows, *cols, x.to_vec()).expect("validated shape");
                lambda * linalg::svd(&m).sigma.iter().sum::<f64>()
            }
            ProxSpec::SortedL1 { weights } => {
                let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
                a.sort_by(|p, q| q.total_cmp(p));
                a.iter().zip(weights).map(|(v, w)| v * w).sum()
            }
        }
    }

    /// `argmin_z ‖z − v‖²/(2s) + h(z)`.
    pub fn prox(&self, v: &[f64], s: f64) -> Result<Vec<f64>> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::invalid(format!("prox step must be positive, got {s}")));
        }
        self.check_dim(v.len())?;
        Ok(match self {
            ProxSpec::Zero => v.to_vec(),
            ProxSpec::L1 { lambda } => v.iter().map(|x| soft_threshold(*x, s * lambda)).collect(),
            ProxSpec::NonNeg => v.iter().map(|x| x.max(0.0)).collect(),
            ProxSpec::L1Ball { radius } => project_l1_ball(v, *radius),
            ProxSpec::Nuclear { lambda, rows, cols } => nuclear_shrink(v, *rows, *cols, s * lambda),
            ProxSpec::SortedL1 { weights } => {
                let w: Vec<f64> = weights.iter().map(|w| s * w).collect();
                sorted_l1_prox(v, &w)
            }
        })
    }
}

fn l1_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// `sign(v)·max(|v| − t, 0)`
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Euclidean projection onto `{‖x‖₁ ≤ radius}` by sorting and thresholding.
pub fn project_l1_ball(v: &[f64], radius: f64) -> Vec<f64> {
    if l1_norm(v) <= radius {
        return v.to_vec();
    }
    let mut u: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    u.sort_by(|p, q| q.total_cmp(p));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - radius) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    v.iter().map(|x| soft_threshold(*x, theta)).collect()
}

/// Prox of the sorted-ℓ1 norm with (already step-scaled) weights `w`.
///
/// Sorts `|v|` in decreasing order (stable, so ties keep index order), solves
/// the isotonic problem on `|v|₍ᵢ₎ − wᵢ` by a pool-adjacent-violators stack,
/// clips at zero, and restores order and signs.
pub fn sorted_l1_prox(v: &[f64], w: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| v[j].abs().total_cmp(&v[i].abs()));

    // Each block: (first index, length, sum of targets).
    let mut blocks: Vec<(usize, usize, f64)> = Vec::with_capacity(n);
    for (pos, &i) in order.iter().enumerate() {
        blocks.push((pos, 1, v[i].abs() - w[pos]));
        while blocks.len() > 1 {
            let (_, l1, s1) = blocks[blocks.len() - 1];
            let (_, l0, s0) = blocks[blocks.len() - 2];
            // Merge while the fitted sequence would increase.
            if s0 / l0 as f64 > s1 / l1 as f64 {
                break;
            }
            blocks.pop();
            let top = blocks.last_mut().expect("two blocks present");
            top.1 = l0 + l1;
            top.2 = s0 + s1;
        }
    }

    let mut out = vec![0.0; n];
    for (start, len, sum) in blocks {
        let level = (sum / len as f64).max(0.0);
        for &i in &order[start..start + len] {
            out[i] = if v[i] < 0.0 { -level } else { level };
        }
    }
    out
}

/// Singular value soft-thresholding of a row-major matrix by `tau`.
fn nuclear_shrink(v: &[f64], rows: usize, cols: usize, tau: f64) -> Vec<f64> {
    let m = Matrix::new(rows, cols, v.to_vec()).expect("validated shape");
    let tall = rows >= cols;
    let work = if tall { m } else { m.transpose() };
    let (w, _) = linalg::jacobi_columns(&work, false);
    let (r, c) = (work.rows(), work.cols());
    // With W = A V having orthogonal columns wⱼ of norm σⱼ, Vᵀ = diag(σ⁻²) Wᵀ A,
    // so X = Σ_{σⱼ > τ} (1 − τ/σⱼ) wⱼ (wⱼᵀ A)/σⱼ².
    let mut x = vec![0.0; r * c];
    let mut row = vec![0.0; c];
    for j in 0..c {
        let wj = w.column(j);
        let sigma_sq = linalg::norm_sq(&wj);
        let sigma = libm::sqrt(sigma_sq);
        if sigma <= tau {
            continue;
        }
        work.mul_t_vec_into(&wj, &mut row);
        let scale = (sigma - tau) / (sigma * sigma_sq);
        for (i, wi) in wj.iter().enumerate() {
            linalg::axpy(scale * wi, &row, &mut x[i * c..(i + 1) * c]);
        }
    }
    if tall {
        x
    } else {
        Matrix::new(r, c, x).expect("shape").transpose().into_data()
    }
}

/// `G_s(y) = (y − prox(h, y − s∇g(y), s))/s`; equals `∇g(y)` exactly when `h = 0`.
pub fn proximal_subgradient<G: Smooth>(obj: &CompositeObjective<G>, y: &[f64], s: f64) -> Result<Vec<f64>> {
    check_dim(obj.dim(), y.len())?;
    let grad = obj.g.gradient(y);
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid(format!("step must be positive, got {s}")));
    }
    if obj.h == ProxSpec::Zero {
        return Ok(grad);
    }
    let x = prox_point(obj, y, &grad, s)?;
    Ok(y.iter().zip(&x).map(|(yi, xi)| (yi - xi) / s).collect())
}

/// `prox(h, y − s·grad, s)`, computed as a plain gradient step when `h = 0`.
pub(crate) fn prox_point<G: Smooth>(obj: &CompositeObjective<G>, y: &[f64], grad: &[f64], s: f64) -> Result<Vec<f64>> {
    let forward: Vec<f64> = y.iter().zip(grad).map(|(yi, gi)| yi - s * gi).collect();
    if obj.h == ProxSpec::Zero {
        return Ok(forward);
    }
    obj.h.prox(&forward, s)
}

/// Element of `∂f(x)` for `f = ½‖Ax − y‖² + λ‖x‖₁` selected by the direction `p`.
///
/// Components with `xᵢ ≠ 0` use `sgn(xᵢ)`, those with `xᵢ = 0, pᵢ ≠ 0` use
/// `sgn(pᵢ)`, and those with `xᵢ = pᵢ = 0` use the minimum-norm element
/// `sgn(cᵢ)(|cᵢ| − λ)₊` where `c = Aᵀ(Ax − y)`.
pub fn lasso_directional_subgradient(a: &Matrix, y: &[f64], lambda: f64, x: &[f64], p: &[f64]) -> Result<Vec<f64>> {
    check_dim(a.rows(), y.len())?;
    check_dim(a.cols(), x.len())?;
    check_dim(a.cols(), p.len())?;
    let mut r = a.mul_vec(x);
    linalg::axpy(-1.0, y, &mut r);
    let mut c = a.mul_t_vec(&r);
    lasso_select(&mut c, lambda, x, p);
    Ok(c)
}

/// Turns `c = Aᵀ(Ax − y)` into the directional subgradient in place.
pub(crate) fn lasso_select(c: &mut [f64], lambda: f64, x: &[f64], p: &[f64]) {
    for ((ci, xi), pi) in c.iter_mut().zip(x).zip(p) {
        if *xi != 0.0 {
            *ci += lambda * xi.signum();
        } else if *pi != 0.0 {
            *ci += lambda * pi.signum();
        } else {
            *ci = soft_threshold(*ci, lambda);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Quadratic;

    #[test]
    fn closed_forms() {
        assert_eq!(ProxSpec::Zero.prox(&[1.5, -2.0], 0.3).unwrap(), vec![1.5, -2.0]);
        assert_eq!(ProxSpec::L1 { lambda: 1.0 }.prox(&[2.0, -0.5], 1.0).unwrap(), vec![1.0, 0.0]);
        assert_eq!(ProxSpec::NonNeg.prox(&[2.0, -0.5], 1.0).unwrap(), vec![2.0, 0.0]);
    }

    #[test]
    fn step_must_be_positive() {
        for s in [0.0, -1.0, f64::NAN] {
            assert!(ProxSpec::Zero.prox(&[1.0], s).is_err());
        }
    }

    #[test]
    fn nuclear_shape_is_checked() {
        let h = ProxSpec::Nuclear { lambda: 1.0, rows: 2, cols: 3 };
        assert!(matches!(h.prox(&[0.0; 5], 1.0), Err(Error::DimensionMismatch { expected: 6, found: 5 })));
    }

    #[test]
    fn nuclear_shrinks_diagonal() {
        // diag(3, 1) padded to 2×3: singular values 3 and 1.
        let h = ProxSpec::Nuclear { lambda: 1.0, rows: 2, cols: 3 };
        let z = h.prox(&[3.0, 0.0, 0.0, 0.0, -1.0, 0.0], 1.5).unwrap();
        let want = [1.5, 0.0, 0.0, 0.0, 0.0, 0.0];
        for (a, b) in z.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((h.value(&[3.0, 0.0, 0.0, 0.0, -1.0, 0.0]) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn l1_ball_projection_hand_case() {
        // ‖(3, −1)‖₁ = 4 onto radius 2: threshold θ = 1 gives (2, 0).
        assert_eq!(project_l1_ball(&[3.0, -1.0], 2.0), vec![2.0, 0.0]);
        assert_eq!(project_l1_ball(&[0.5, -0.5], 2.0), vec![0.5, -0.5]);
    }

    #[test]
    fn sorted_l1_hand_case() {
        // |v| sorted = (4, 3), w = (2, 2) gives (2, 1) without pooling.
        assert_eq!(sorted_l1_prox(&[3.0, -4.0], &[2.0, 2.0]), vec![1.0, -2.0]);
        // w = (3, 0): targets (1, 3) violate order and pool to 2.
        assert_eq!(sorted_l1_prox(&[3.0, -4.0], &[3.0, 0.0]), vec![2.0, -2.0]);
    }

    #[test]
    fn sorted_weights_are_validated() {
        assert!(ProxSpec::SortedL1 { weights: vec![1.0, 2.0] }.validate().is_err());
        assert!(ProxSpec::SortedL1 { weights: vec![1.0, -0.1] }.validate().is_err());
        assert!(ProxSpec::L1Ball { radius: 0.0 }.validate().is_err());
    }

    #[test]
    fn proximal_subgradient_hand_case() {
        let f = CompositeObjective::new(Quadratic::new(vec![1.0]).unwrap(), ProxSpec::L1 { lambda: 1.0 }).unwrap();
        assert_eq!(proximal_subgradient(&f, &[3.0], 0.5).unwrap(), vec![4.0]);
        let g = CompositeObjective::smooth(Quadratic::new(vec![0.3, 7.0]).unwrap());
        assert_eq!(proximal_subgradient(&g, &[1.1, -0.7], 0.01).unwrap(), g.g.gradient(&[1.1, -0.7]));
    }

    #[test]
    fn directional_subgradient_branches() {
        let a = Matrix::identity(3);
        let y = [1.0, 0.0, 0.0];
        // c = x − y
        let g = lasso_directional_subgradient(&a, &y, 0.5, &[2.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(g, vec![1.5, 0.5, 0.0]);
        let g = lasso_directional_subgradient(&a, &[3.0, 0.2, 0.0], 0.5, &[0.0, 0.0, -1.0], &[0.0; 3]).unwrap();
        assert_eq!(g, vec![-2.5, 0.0, -1.5]);
    }
}
