use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::lm::{levenberg_marquardt, LmOptions};
use crate::error::{Error, Result};
use crate::tempo::Trajectory;

/// Best fit of `A e^{−γt} cos(Ωt + φ₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub omega_fit: f64,
    pub gamma_fit: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub rms_residual: f64,
    pub t_window: (f64, f64),
}

impl FitResult {
    pub fn evaluate(&self, t: f64) -> f64 {
        self.amplitude * (-self.gamma_fit * t).exp() * (self.omega_fit * t + self.phase).cos()
    }
}

/// Fit `P_z(t)` on `t ≥ t_min`.
pub fn fit_damped_cosine(traj: &Trajectory, t_min: f64) -> Result<FitResult> {
    fit_damped_cosine_series(&traj.times, &traj.pz, t_min)
}

/// Fit an arbitrary uniformly sampled series on `t ≥ t_min`.
///
/// The frequency is initialized from the peak of the discrete spectrum and
/// the rate from a log-linear regression of the local maxima of `|y|`.
pub fn fit_damped_cosine_series(times: &[f64], values: &[f64], t_min: f64) -> Result<FitResult> {
    if times.len() != values.len() {
        return Err(Error::Fit("time and value arrays differ in length".into()));
    }
    let (t, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= t_min)
        .map(|(t, y)| (*t, *y))
        .unzip();
    if t.len() < 8 {
        return Err(Error::Fit(format!(
            "only {} samples after t_min = {t_min}",
            t.len()
        )));
    }
    let window = (t[0], t[t.len() - 1]);
    let span = window.1 - window.0;
    let dt = span / (t.len() - 1) as f64;

    let omega0 = spectral_peak(&t, &y, dt, span);
    if omega0 * span < 2.0 * std::f64::consts::PI * 2.0 * 0.999 {
        return Err(Error::Fit(format!(
            "window of length {span} holds fewer than two periods of the dominant frequency {omega0}"
        )));
    }
    let gamma0 = envelope_rate(&t, &y).max(0.0);
    let (amp0, phase0) = linear_amplitude(&t, &y, omega0, gamma0)
        .ok_or_else(|| Error::Fit("degenerate initial amplitude problem".into()))?;

    let t0 = window.0;
    // Parameters: (A, γ, Ω, φ) with time measured from the window start to
    // decorrelate A and γ; the phase is shifted back afterwards.
    let tt: Vec<f64> = t.iter().map(|x| x - t0).collect();
    let amp_start = amp0 * (-gamma0 * t0).exp();
    let phase_start = phase0 + omega0 * t0;
    let res = |p: &DVector<f64>| {
        Some(DVector::from_iterator(
            tt.len(),
            tt.iter()
                .zip(&y)
                .map(|(&s, &v)| p[0] * (-p[1] * s).exp() * (p[2] * s + p[3]).cos() - v),
        ))
    };
    let jac = |p: &DVector<f64>| {
        let mut j = DMatrix::zeros(tt.len(), 4);
        for (i, &s) in tt.iter().enumerate() {
            let e = (-p[1] * s).exp();
            let (sn, cs) = (p[2] * s + p[3]).sin_cos();
            j[(i, 0)] = e * cs;
            j[(i, 1)] = -s * p[0] * e * cs;
            j[(i, 2)] = -s * p[0] * e * sn;
            j[(i, 3)] = -p[0] * e * sn;
        }
        j
    };
    let start = DVector::from_vec(vec![amp_start, gamma0, omega0, phase_start]);
    let out = levenberg_marquardt(res, jac, start, LmOptions::default())?;
    let mut p = out.x;
    let mut cost = out.cost;

    if p[1] < 0.0 {
        // Constrained optimum sits on γ = 0: refit with the rate fixed.
        let res0 = |q: &DVector<f64>| {
            Some(DVector::from_iterator(
                tt.len(),
                tt.iter()
                    .zip(&y)
                    .map(|(&s, &v)| q[0] * (q[1] * s + q[2]).cos() - v),
            ))
        };
        let jac0 = |q: &DVector<f64>| {
            let mut j = DMatrix::zeros(tt.len(), 3);
            for (i, &s) in tt.iter().enumerate() {
                let (sn, cs) = (q[1] * s + q[2]).sin_cos();
                j[(i, 0)] = cs;
                j[(i, 1)] = -s * q[0] * sn;
                j[(i, 2)] = -q[0] * sn;
            }
            j
        };
        let q0 = DVector::from_vec(vec![p[0], p[2], p[3]]);
        let fixed = levenberg_marquardt(res0, jac0, q0, LmOptions::default())?;
        p = DVector::from_vec(vec![fixed.x[0], 0.0, fixed.x[1], fixed.x[2]]);
        cost = fixed.cost;
    }

    let (mut amp, gamma, mut omega, mut phase) = (p[0], p[1], p[2], p[3]);
    if omega < 0.0 {
        omega = -omega;
        phase = -phase;
    }
    if amp < 0.0 {
        amp = -amp;
        phase += std::f64::consts::PI;
    }
    // Refer amplitude and phase to t = 0.
    amp *= (gamma * t0).exp();
    phase -= omega * t0;
    phase = phase.rem_euclid(2.0 * std::f64::consts::PI);
    if phase > std::f64::consts::PI {
        phase -= 2.0 * std::f64::consts::PI;
    }
    let result = FitResult {
        omega_fit: omega,
        gamma_fit: gamma,
        amplitude: amp,
        phase,
        rms_residual: (cost / t.len() as f64).sqrt(),
        t_window: window,
    };
    if ![
        result.omega_fit,
        result.gamma_fit,
        result.amplitude,
        result.phase,
    ]
    .iter()
    .all(|x| x.is_finite())
    {
        return Err(Error::Fit("non-finite fit parameters".into()));
    }
    Ok(result)
}

/// Frequency of the largest peak of `|Σ y e^{−iωt}|`, on a grid four times
/// finer than the natural resolution, refined by golden-section search.
fn spectral_peak(t: &[f64], y: &[f64], dt: f64, span: f64) -> f64 {
    let power = |w: f64| {
        let (mut re, mut im) = (0.0, 0.0);
        for (ti, yi) in t.iter().zip(y) {
            let (s, c) = (w * ti).sin_cos();
            re += yi * c;
            im -= yi * s;
        }
        re * re + im * im
    };
    let step = std::f64::consts::PI / (2.0 * span);
    let nyquist = std::f64::consts::PI / dt;
    let n = ((nyquist / step) as usize).max(2);
    let mut best = (step, f64::MIN);
    for i in 1..n {
        let w = i as f64 * step;
        let p = power(w);
        if p > best.1 {
            best = (w, p);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(0.0), best.0 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if power(c) > power(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Rate from a straight-line fit of `ln|y|` at the local maxima of `|y|`.
fn envelope_rate(t: &[f64], y: &[f64]) -> f64 {
    let peaks: Vec<(f64, f64)> = (1..y.len() - 1)
        .filter(|&i| y[i].abs() > y[i - 1].abs() && y[i].abs() >= y[i + 1].abs() && y[i] != 0.0)
        .map(|i| (t[i], y[i].abs().ln()))
        .collect();
    if peaks.len() < 2 {
        return 0.0;
    }
    let n = peaks.len() as f64;
    let mx = peaks.iter().map(|p| p.0).sum::<f64>() / n;
    let my = peaks.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = peaks.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = peaks.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        -sxy / sxx
    }
}

/// Linear least squares for `(a, b)` in `e^{−γt}(a cos Ωt + b sin Ωt)`.
fn linear_amplitude(t: &[f64], y: &[f64], omega: f64, gamma: f64) -> Option<(f64, f64)> {
    let mut m = Matrix2::zeros();
    let mut rhs = Vector2::zeros();
    for (&ti, &yi) in t.iter().zip(y) {
        let e = (-gamma * ti).exp();
        let (s, c) = (omega * ti).sin_cos();
        let basis = Vector2::new(e * c, e * s);
        m += basis * basis.transpose();
        rhs += basis * yi;
    }
    let sol = m.lu().solve(&rhs)?;
    // a cos + b sin = R cos(Ωt + φ) with R cos φ = a, −R sin φ = b.
    Some((sol[0].hypot(sol[1]), (-sol[1]).atan2(sol[0])))
}

/// Best fit of `c + D e^{−κt} + A e^{−γt} cos(Ωt + φ₀)`: an oscillation on
/// top of a relaxing mean, as seen in components that do not average to
/// zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxingFit {
    pub offset: f64,
    pub drift_amplitude: f64,
    pub drift_rate: f64,
    /// The oscillating part; its `rms_residual` is that of the full model.
    pub oscillation: FitResult,
}

impl RelaxingFit {
    pub fn evaluate(&self, t: f64) -> f64 {
        self.offset
            + self.drift_amplitude * (-self.drift_rate * t).exp()
            + self.oscillation.evaluate(t)
    }
}

/// Fit [`RelaxingFit`]'s model on `t ≥ t_min`.
///
/// The drift is initialized by a scan over `κ` with `(c, D)` solved
/// linearly; the oscillation from [`fit_damped_cosine_series`] on the
/// remainder.
pub fn fit_relaxing_oscillation_series(
    times: &[f64],
    values: &[f64],
    t_min: f64,
) -> Result<RelaxingFit> {
    if times.len() != values.len() {
        return Err(Error::Fit("time and value arrays differ in length".into()));
    }
    let (t, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= t_min)
        .map(|(t, y)| (*t, *y))
        .unzip();
    if t.len() < 16 {
        return Err(Error::Fit(format!(
            "only {} samples after t_min = {t_min}",
            t.len()
        )));
    }
    let t0 = t[0];
    let span = t[t.len() - 1] - t0;
    let tt: Vec<f64> = t.iter().map(|x| x - t0).collect();

    let drift_at = |kappa: f64| -> Option<(f64, f64, f64)> {
        let mut m = Matrix2::zeros();
        let mut rhs = Vector2::zeros();
        for (&ti, &yi) in tt.iter().zip(&y) {
            let b = Vector2::new(1.0, (-kappa * ti).exp());
            m += b * b.transpose();
            rhs += b * yi;
        }
        let sol = m.lu().solve(&rhs)?;
        let cost = tt
            .iter()
            .zip(&y)
            .map(|(&ti, &yi)| (sol[0] + sol[1] * (-kappa * ti).exp() - yi).powi(2))
            .sum();
        Some((sol[0], sol[1], cost))
    };
    let mut drift0: Option<(f64, f64, f64, f64)> = None;
    for i in 0..60 {
        let kappa = 0.1 / span * 1000f64.powf(i as f64 / 59.0);
        if let Some((c, d, cost)) = drift_at(kappa) {
            if drift0.is_none_or(|(.., best)| cost < best) {
                drift0 = Some((c, d, kappa, cost));
            }
        }
    }
    let (c0, d0, k0, _) =
        drift0.ok_or_else(|| Error::Fit("degenerate drift initialization".into()))?;
    let rest: Vec<f64> = tt
        .iter()
        .zip(&y)
        .map(|(&ti, &yi)| yi - c0 - d0 * (-k0 * ti).exp())
        .collect();
    let osc = fit_damped_cosine_series(&tt, &rest, 0.0)?;

    let model = |p: &DVector<f64>, s: f64| {
        p[0] + p[1] * (-p[2] * s).exp() + p[3] * (-p[4] * s).exp() * (p[5] * s + p[6]).cos()
    };
    let res = |p: &DVector<f64>| {
        Some(DVector::from_iterator(
            tt.len(),
            tt.iter().zip(&y).map(|(&s, &v)| model(p, s) - v),
        ))
    };
    let jac = |p: &DVector<f64>| {
        let mut j = DMatrix::zeros(tt.len(), 7);
        for (i, &s) in tt.iter().enumerate() {
            let ed = (-p[2] * s).exp();
            let e = (-p[4] * s).exp();
            let (sn, cs) = (p[5] * s + p[6]).sin_cos();
            j[(i, 0)] = 1.0;
            j[(i, 1)] = ed;
            j[(i, 2)] = -s * p[1] * ed;
            j[(i, 3)] = e * cs;
            j[(i, 4)] = -s * p[3] * e * cs;
            j[(i, 5)] = -s * p[3] * e * sn;
            j[(i, 6)] = -p[3] * e * sn;
        }
        j
    };
    let start = DVector::from_vec(vec![
        c0,
        d0,
        k0,
        osc.amplitude,
        osc.gamma_fit,
        osc.omega_fit,
        osc.phase,
    ]);
    let out = levenberg_marquardt(res, jac, start, LmOptions::default())?;
    let p = out.x;

    let (mut amp, gamma, mut omega, mut phase) = (p[3], p[4], p[5], p[6]);
    if omega < 0.0 {
        omega = -omega;
        phase = -phase;
    }
    if amp < 0.0 {
        amp = -amp;
        phase += std::f64::consts::PI;
    }
    amp *= (gamma * t0).exp();
    phase = (phase - omega * t0).rem_euclid(2.0 * std::f64::consts::PI);
    if phase > std::f64::consts::PI {
        phase -= 2.0 * std::f64::consts::PI;
    }
    let fit = RelaxingFit {
        offset: p[0],
        drift_amplitude: p[1] * (p[2] * t0).exp(),
        drift_rate: p[2],
        oscillation: FitResult {
            omega_fit: omega,
            gamma_fit: gamma,
            amplitude: amp,
            phase,
            rms_residual: (out.cost / t.len() as f64).sqrt(),
            t_window: (t0, t[t.len() - 1]),
        },
    };
    let params = [
        fit.offset,
        fit.drift_amplitude,
        fit.drift_rate,
        amp,
        gamma,
        omega,
        phase,
    ];
    if !params.iter().all(|x| x.is_finite()) {
        return Err(Error::Fit("non-finite fit parameters".into()));
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(n: usize, dt: f64, f: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let y = t.iter().map(|&x| f(x)).collect();
        (t, y)
    }

    #[test]
    fn recovers_own_model() {
        let (t, y) = series(4001, 0.01, |x| 0.5 * (-0.01 * x).exp() * (0.45 * x).cos());
        let fit = fit_damped_cosine_series(&t, &y, 0.0).unwrap();
        assert!((fit.omega_fit - 0.45).abs() < 1e-6, "{fit:?}");
        assert!((fit.gamma_fit - 0.01).abs() < 1e-6);
        assert!((fit.amplitude - 0.5).abs() < 1e-6);
        assert!(fit.phase.abs() < 1e-6);
        assert!(fit.rms_residual <= 1e-8);
    }

    #[test]
    fn phase_and_late_window() {
        let (t, y) = series(3001, 0.01, |x| {
            0.3 * (-0.05 * x).exp() * (1.3 * x - 0.7).cos()
        });
        let fit = fit_damped_cosine_series(&t, &y, 5.0).unwrap();
        assert!((fit.omega_fit - 1.3).abs() < 1e-8);
        assert!((fit.gamma_fit - 0.05).abs() < 1e-8);
        assert!((fit.amplitude - 0.3).abs() < 1e-8);
        assert!((fit.phase + 0.7).abs() < 1e-8);
        assert_eq!(fit.t_window.0, 5.0);
    }

    #[test]
    fn undamped_cosine_gives_zero_rate() {
        let (t, y) = series(2001, 0.01, |x| 0.5 * x.cos());
        let fit = fit_damped_cosine_series(&t, &y, 0.0).unwrap();
        assert!((fit.omega_fit - 1.0).abs() < 1e-4);
        assert!(fit.gamma_fit >= 0.0 && fit.gamma_fit < 1e-4);
    }

    #[test]
    fn too_short_window_rejected() {
        let (t, y) = series(101, 0.01, |x| 0.5 * (0.45 * x).cos());
        assert!(matches!(
            fit_damped_cosine_series(&t, &y, 0.0),
            Err(Error::Fit(_))
        ));
    }
    #[test]
    fn relaxing_oscillation_round_trip() {
        let truth = |x: f64| {
            -0.1 + 0.09 * (-0.03 * x).exp() + 0.07 * (-0.013 * x).exp() * (0.78 * x + 0.2).cos()
        };
        let (t, y) = series(3001, 0.01, truth);
        let fit = fit_relaxing_oscillation_series(&t, &y, 1.0).unwrap();
        assert!((fit.offset + 0.1).abs() < 1e-6, "{fit:?}");
        assert!((fit.drift_rate - 0.03).abs() < 1e-6);
        assert!((fit.oscillation.gamma_fit - 0.013).abs() < 1e-6);
        assert!((fit.oscillation.omega_fit - 0.78).abs() < 1e-6);
        assert!((fit.evaluate(7.0) - truth(7.0)).abs() < 1e-8);
    }
}
