use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::lm::{levenberg_marquardt, LmOptions};
use super::scan::PhaseBoundaryPoint;
use crate::error::{Error, Result};
use crate::special::{digamma, gamma};

/// `α_B(s) ≈ A / (8 Γ(B s − C))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Covariance of the free parameters (`(A, B, C)` or just `A`), scaled
    /// by the residual variance; zero when there are no spare degrees of
    /// freedom.
    pub covariance: Vec<Vec<f64>>,
    /// Root-mean-square residual.
    pub residual: f64,
    pub fixed_bc: bool,
}

impl GammaFit {
    pub fn evaluate(&self, s: f64) -> f64 {
        gamma_boundary_model(s, self.a, self.b, self.c)
    }
}

pub fn gamma_boundary_model(s: f64, a: f64, b: f64, c: f64) -> f64 {
    a / (8.0 * gamma(b * s - c))
}

/// Fit the boundary points; `fixed_bc = Some((B, C))` fits `A` alone.
pub fn fit_gamma_boundary(
    points: &[PhaseBoundaryPoint],
    fixed_bc: Option<(f64, f64)>,
) -> Result<GammaFit> {
    let s: Vec<f64> = points.iter().map(|p| p.s).collect();
    let alpha: Vec<f64> = points.iter().map(|p| p.alpha_b).collect();
    fit_gamma_boundary_data(&s, &alpha, fixed_bc)
}

/// Same as [`fit_gamma_boundary`] on raw `(s, α_B)` arrays. The three
/// parameter fit starts from `(A, B, C) = (5, 1, 0.5)`.
pub fn fit_gamma_boundary_data(
    s: &[f64],
    alpha: &[f64],
    fixed_bc: Option<(f64, f64)>,
) -> Result<GammaFit> {
    if s.len() != alpha.len() {
        return Err(Error::Fit("s and alpha arrays differ in length".into()));
    }
    if !s.iter().chain(alpha).all(|x| x.is_finite()) {
        return Err(Error::Fit("non-finite input".into()));
    }
    let n = s.len();
    match fixed_bc {
        Some((b, c)) => {
            if n == 0 {
                return Err(Error::Fit(
                    "fixed (B, C) fit needs at least one point".into(),
                ));
            }
            if let Some(bad) = s.iter().find(|&&x| b * x - c <= 0.0) {
                return Err(Error::Fit(format!("B s − C <= 0 at s = {bad}")));
            }
            // Linear in A: y = A g with g = 1/(8Γ(Bs − C)).
            let g: Vec<f64> = s
                .iter()
                .map(|&x| gamma_boundary_model(x, 1.0, b, c))
                .collect();
            let gg: f64 = g.iter().map(|v| v * v).sum();
            let a = g.iter().zip(alpha).map(|(g, y)| g * y).sum::<f64>() / gg;
            let ssr: f64 = g.iter().zip(alpha).map(|(g, y)| (a * g - y).powi(2)).sum();
            let var = if n > 1 { ssr / (n - 1) as f64 } else { 0.0 };
            Ok(GammaFit {
                a,
                b,
                c,
                covariance: vec![vec![var / gg]],
                residual: (ssr / n as f64).sqrt(),
                fixed_bc: true,
            })
        }
        None => {
            if n < 3 {
                return Err(Error::Fit(format!(
                    "three-parameter fit needs >= 3 points, got {n}"
                )));
            }
            let res = |p: &DVector<f64>| {
                if s.iter().any(|&x| p[1] * x - p[2] <= 0.0) {
                    return None;
                }
                Some(DVector::from_iterator(
                    n,
                    s.iter()
                        .zip(alpha)
                        .map(|(&x, &y)| gamma_boundary_model(x, p[0], p[1], p[2]) - y),
                ))
            };
            let jac = |p: &DVector<f64>| {
                let mut j = DMatrix::zeros(n, 3);
                for (i, &x) in s.iter().enumerate() {
                    let z = p[1] * x - p[2];
                    let f = gamma_boundary_model(x, 1.0, p[1], p[2]);
                    let psi = digamma(z);
                    j[(i, 0)] = f;
                    j[(i, 1)] = -p[0] * f * psi * x;
                    j[(i, 2)] = p[0] * f * psi;
                }
                j
            };
            let start = DVector::from_vec(vec![5.0, 1.0, 0.5]);
            let out = levenberg_marquardt(res, jac, start, LmOptions::default())?;
            let inv = out
                .jtj
                .clone()
                .try_inverse()
                .filter(|m| m.iter().all(|x| x.is_finite()))
                .ok_or_else(|| Error::Fit("singular Jacobian at the solution".into()))?;
            let var = if n > 3 {
                out.cost / (n - 3) as f64
            } else {
                0.0
            };
            let covariance = (0..3)
                .map(|i| (0..3).map(|j| var * inv[(i, j)]).collect())
                .collect();
            Ok(GammaFit {
                a: out.x[0],
                b: out.x[1],
                c: out.x[2],
                covariance,
                residual: (out.cost / n as f64).sqrt(),
                fixed_bc: false,
            })
        }
    }
}
