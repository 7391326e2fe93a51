//! Small dense Levenberg–Marquardt solver (Marquardt diagonal scaling).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct LmOptions {
    pub max_iterations: usize,
    /// Stop when the relative step norm falls below this.
    pub x_tol: f64,
    /// Stop when the relative cost decrease falls below this.
    pub f_tol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            x_tol: 1e-14,
            f_tol: 1e-16,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct LmOutcome {
    pub x: DVector<f64>,
    /// Sum of squared residuals.
    pub cost: f64,
    /// `JᵀJ` at the solution.
    pub jtj: DMatrix<f64>,
}

/// Minimize `‖r(x)‖²`. `residual` may return `None` for points outside the
/// model's domain; such trial steps are rejected.
pub(crate) fn levenberg_marquardt(
    residual: impl Fn(&DVector<f64>) -> Option<DVector<f64>>,
    jacobian: impl Fn(&DVector<f64>) -> DMatrix<f64>,
    x0: DVector<f64>,
    opts: LmOptions,
) -> Result<LmOutcome> {
    let mut x = x0;
    let mut r =
        residual(&x).ok_or_else(|| Error::Fit("initial guess outside model domain".into()))?;
    let mut cost = r.norm_squared();
    if !cost.is_finite() {
        return Err(Error::Fit("non-finite residual at initial guess".into()));
    }
    let mut lambda = 1e-3;
    let mut jac = jacobian(&x);
    for _ in 0..opts.max_iterations {
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        if g.amax() == 0.0 {
            return Ok(LmOutcome { x, cost, jtj });
        }
        let mut accepted = false;
        for _ in 0..60 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                lambda *= 10.0;
                continue;
            };
            let trial = &x + &step;
            match residual(&trial) {
                Some(rt) if rt.norm_squared().is_finite() && rt.norm_squared() <= cost => {
                    let new_cost = rt.norm_squared();
                    let small_step = step.norm() <= opts.x_tol * (x.norm() + opts.x_tol);
                    let small_gain = cost - new_cost <= opts.f_tol * cost;
                    x = trial;
                    r = rt;
                    cost = new_cost;
                    lambda = (lambda * 0.3).max(1e-15);
                    accepted = true;
                    if small_step || small_gain {
                        let jac = jacobian(&x);
                        let jtj = jac.transpose() * &jac;
                        return Ok(LmOutcome { x, cost, jtj });
                    }
                    break;
                }
                _ => lambda *= 10.0,
            }
        }
        if !accepted {
            // No descent direction left at machine precision.
            return Ok(LmOutcome { x, cost, jtj });
        }
        jac = jacobian(&x);
    }
    Err(Error::Fit(format!(
        "no convergence after {} iterations (cost {cost:e})",
        opts.max_iterations
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let res = |x: &DVector<f64>| {
            Some(DVector::from_vec(vec![
                10.0 * (x[1] - x[0] * x[0]),
                1.0 - x[0],
            ]))
        };
        let jac =
            |x: &DVector<f64>| DMatrix::from_row_slice(2, 2, &[-20.0 * x[0], 10.0, -1.0, 0.0]);
        let out = levenberg_marquardt(
            res,
            jac,
            DVector::from_vec(vec![-1.2, 1.0]),
            LmOptions::default(),
        )
        .unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-10 && (out.x[1] - 1.0).abs() < 1e-10);
    }
}
