//! Bound-constrained Levenberg–Marquardt.

use nalgebra::{DMatrix, DVector};

pub(crate) const DEFAULT_MAX_ITERATIONS: usize = 200;

const XTOL: f64 = 1e-12;
const FTOL: f64 = 1e-15;
const LAMBDA_MAX: f64 = 1e16;

#[derive(Debug, Clone)]
pub(crate) struct LmOutcome {
    pub x: Vec<f64>,
    /// Residual vector and Jacobian at `x`.
    pub residual: DVector<f64>,
    pub jacobian: DMatrix<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl LmOutcome {
    pub fn residual_norm(&self) -> f64 {
        self.residual.norm()
    }

    /// One-sigma parameter uncertainties from s²(JᵀJ)⁻¹ over the parameters that are off their
    /// bounds and actually influence the residual. Others are NaN.
    pub fn uncertainties(&self, lo: &[f64], hi: &[f64]) -> Vec<f64> {
        let n = self.residual.len();
        let p = self.x.len();
        let col_norm: Vec<f64> = (0..p).map(|k| self.jacobian.column(k).norm()).collect();
        let scale = col_norm.iter().cloned().fold(0.0, f64::max);
        let free: Vec<usize> = (0..p)
            .filter(|&k| self.x[k] > lo[k] && self.x[k] < hi[k] && col_norm[k] > 1e-12 * scale)
            .collect();
        let mut out = vec![f64::NAN; p];
        if free.is_empty() || n <= free.len() {
            return out;
        }
        let j = self.jacobian.select_columns(&free);
        let Some(chol) = (j.transpose() * &j).cholesky() else {
            return out;
        };
        let cov = chol.inverse();
        let s2 = self.residual.norm_squared() / (n - free.len()) as f64;
        for (a, &k) in free.iter().enumerate() {
            out[k] = (s2 * cov[(a, a)]).sqrt();
        }
        out
    }
}

/// Minimizes ‖r(x)‖² subject to `lo ≤ x ≤ hi`.
///
/// `model` returns the residual and its Jacobian. Steps are projected onto the box; the
/// damping is scaled by the running maximum of diag(JᵀJ).
pub(crate) fn minimize<F>(model: F, x0: &[f64], lo: &[f64], hi: &[f64], max_iter: usize) -> LmOutcome
where
    F: Fn(&[f64]) -> (DVector<f64>, DMatrix<f64>),
{
    let p = x0.len();
    let clamp = |x: &mut [f64]| {
        for k in 0..p {
            x[k] = x[k].clamp(lo[k], hi[k]);
        }
    };
    let mut x = x0.to_vec();
    clamp(&mut x);
    let (mut r, mut jac) = model(&x);
    let mut cost = r.norm_squared();
    let mut d = vec![0.0f64; p];
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iter && !converged {
        iterations += 1;
        let a = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        for k in 0..p {
            d[k] = d[k].max(a[(k, k)]);
        }
        let dmax = d.iter().cloned().fold(0.0, f64::max);
        let floor = if dmax > 0.0 { 1e-12 * dmax } else { 1.0 };
        let scale: Vec<f64> = d.iter().map(|&v| v.max(floor)).collect();

        loop {
            let mut m = a.clone();
            for k in 0..p {
                m[(k, k)] += lambda * scale[k];
            }
            let step = m.cholesky().map(|c| c.solve(&(-&g)));
            let Some(step) = step else {
                lambda *= 10.0;
                if lambda > LAMBDA_MAX {
                    converged = true;
                    break;
                }
                continue;
            };
            let mut xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            clamp(&mut xn);
            let (rn, jn) = model(&xn);
            let cost_n = rn.norm_squared();
            if cost_n.is_finite() && cost_n < cost {
                let dx: f64 = (0..p).map(|k| scale[k] * (xn[k] - x[k]).powi(2)).sum::<f64>().sqrt();
                let xs: f64 = (0..p).map(|k| scale[k] * x[k].powi(2)).sum::<f64>().sqrt();
                if dx <= XTOL * (xs + XTOL) || cost - cost_n <= FTOL * cost {
                    converged = true;
                }
                x = xn;
                r = rn;
                jac = jn;
                cost = cost_n;
                lambda = (lambda / 3.0).max(1e-15);
                break;
            }
            lambda *= 4.0;
            if lambda > LAMBDA_MAX {
                // No descent left at working precision.
                converged = true;
                break;
            }
        }
    }

    LmOutcome {
        x,
        residual: r,
        jacobian: jac,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_fit() {
        let t: Vec<f64> = (0..40).map(|k| k as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|&t| 2.5 * (-1.3 * t).exp() + 0.2).collect();
        let model = |x: &[f64]| {
            let r = DVector::from_iterator(t.len(), t.iter().zip(&y).map(|(&t, &y)| x[0] * (-x[1] * t).exp() + x[2] - y));
            let j = DMatrix::from_fn(t.len(), 3, |i, k| match k {
                0 => (-x[1] * t[i]).exp(),
                1 => -x[0] * t[i] * (-x[1] * t[i]).exp(),
                _ => 1.0,
            });
            (r, j)
        };
        let out = minimize(model, &[1.0, 0.5, 0.0], &[0.0, 0.0, -10.0], &[10.0, 10.0, 10.0], 200);
        assert!(out.converged);
        assert!((out.x[0] - 2.5).abs() < 1e-9);
        assert!((out.x[1] - 1.3).abs() < 1e-9);
        assert!((out.x[2] - 0.2).abs() < 1e-9);
    }

    #[test]
    fn bound_is_respected() {
        // minimum of (x+1)² at x = −1 lies outside x ≥ 0
        let model = |x: &[f64]| (DVector::from_vec(vec![x[0] + 1.0]), DMatrix::from_vec(1, 1, vec![1.0]));
        let out = minimize(model, &[3.0], &[0.0], &[10.0], 100);
        assert_eq!(out.x[0], 0.0);
        assert!(out.converged);
    }

    #[test]
    fn iteration_cap_reports_unconverged() {
        let model = |x: &[f64]| {
            (
                DVector::from_vec(vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]]),
                DMatrix::from_row_slice(2, 2, &[-20.0 * x[0], 10.0, -1.0, 0.0]),
            )
        };
        let out = minimize(model, &[-1.2, 1.0], &[-5.0, -5.0], &[5.0, 5.0], 2);
        assert!(!out.converged);
        assert_eq!(out.iterations, 2);
        let out = minimize(model, &[-1.2, 1.0], &[-5.0, -5.0], &[5.0, 5.0], 500);
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-8 && (out.x[1] - 1.0).abs() < 1e-8);
    }
}
