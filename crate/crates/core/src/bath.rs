//! Harmonic bath: spectral density, correlation kernel and the discretized
//! influence-functional coefficients.
//!
//! Conventions: the system couples through `σ_z · X` with `X = Σ λ_k q_k`,
//! the spectral function is `G(ω) = 2 α ω_s^{1-s} ω^s e^{-ω/ω_c}` and the
//! kernel is `C(t) = <X(t) X(0)> = ∫ dω G(ω) [coth(βω/2) cos ωt − i sin ωt]`.

use crate::special::gamma;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

/// Upper frequency limit, in units of `ω_c`, for spectral integrals.
pub const FREQUENCY_CUTOFF_FACTOR: f64 = 50.0;

/// Break points (in units of `ω_c`) used to seed adaptive frequency integration.
const FREQUENCY_BREAKS: [f64; 8] = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, FREQUENCY_CUTOFF_FACTOR];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub alpha: f64,
    pub s: f64,
    pub omega_c: f64,
    pub omega_s: f64,
}

impl SpectralDensity {
    /// Standard parameterization with `ω_s = ω_c`.
    pub fn new(alpha: f64, s: f64, omega_c: f64) -> Result<Self> {
        Self::with_normalization(alpha, s, omega_c, omega_c)
    }

    pub fn with_normalization(alpha: f64, s: f64, omega_c: f64, omega_s: f64) -> Result<Self> {
        let sd = Self {
            alpha,
            s,
            omega_c,
            omega_s,
        };
        sd.validate()?;
        Ok(sd)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.alpha, self.s, self.omega_c, self.omega_s]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain(
                "spectral density parameters must be finite".into(),
            ));
        }
        if self.alpha < 0.0 {
            return Err(Error::Domain(format!(
                "alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        if self.s <= 0.0 {
            return Err(Error::Domain(format!(
                "spectral exponent must be > 0, got {}",
                self.s
            )));
        }
        if self.omega_c <= 0.0 || self.omega_s <= 0.0 {
            return Err(Error::Domain("omega_c and omega_s must be > 0".into()));
        }
        Ok(())
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..*self }
    }

    /// `G(ω)` for `ω ≥ 0`.
    pub fn evaluate(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::Domain(format!(
                "frequency must be >= 0, got {omega}"
            )));
        }
        Ok(self.eval_unchecked(omega))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, omega: f64) -> f64 {
        if omega == 0.0 {
            return 0.0;
        }
        2.0 * self.alpha
            * self.omega_s.powf(1.0 - self.s)
            * omega.powf(self.s)
            * (-omega / self.omega_c).exp()
    }

    /// Prefactor `2 α Γ(s+1) ω_c² (ω_s/ω_c)^{1-s}` of the zero-temperature kernel.
    pub(crate) fn kernel_prefactor(&self) -> f64 {
        2.0 * self.alpha
            * gamma(self.s + 1.0)
            * self.omega_c
            * self.omega_c
            * (self.omega_s / self.omega_c).powf(1.0 - self.s)
    }

    pub(crate) fn frequency_breaks(&self) -> [f64; 8] {
        FREQUENCY_BREAKS.map(|x| x * self.omega_c)
    }
}

pub fn spectral_density(omega: f64, sd: &SpectralDensity) -> Result<f64> {
    sd.evaluate(omega)
}

/// Bath temperature. Absolute zero is its own case, never a large `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Temperature {
    #[default]
    Zero,
    /// Inverse temperature `β = 1/(k_B T)` in units of time.
    Beta(f64),
}

impl Temperature {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Temperature::Zero => Ok(()),
            Temperature::Beta(b) if b > 0.0 && b.is_finite() => Ok(()),
            Temperature::Beta(b) => Err(Error::Domain(format!(
                "beta must be finite and > 0, got {b}"
            ))),
        }
    }

    /// `coth(βω/2)`; identically one at absolute zero.
    #[inline]
    pub fn coth_factor(&self, omega: f64) -> f64 {
        match *self {
            Temperature::Zero => 1.0,
            Temperature::Beta(b) => 1.0 / (0.5 * b * omega).tanh(),
        }
    }
}

/// Zero-temperature kernel in closed form,
/// `C(t) = 2 α Γ(s+1) ω_c² (ω_s/ω_c)^{1-s} (1 + i ω_c t)^{-(s+1)}`.
pub fn bath_correlation_zero_t(t: f64, sd: &SpectralDensity) -> Complex64 {
    let x = sd.omega_c * t;
    // (1 + ix)^{-p} = exp(-p [ln(1+x²)/2 + i atan x])
    let p = sd.s + 1.0;
    let log = Complex64::new(0.5 * (x * x).ln_1p(), x.atan());
    (-p * log).exp() * sd.kernel_prefactor()
}

/// Kernel evaluated directly from its frequency integral.
pub fn bath_correlation_quadrature(
    t: f64,
    sd: &SpectralDensity,
    temp: Temperature,
) -> Result<Complex64> {
    let tol = Tolerance::default();
    let est = quad::integrate_pieces(
        |w: f64| {
            let g = sd.eval_unchecked(w);
            let (sin, cos) = (w * t).sin_cos();
            Complex64::new(g * temp.coth_factor(w) * cos, -g * sin)
        },
        &sd.frequency_breaks(),
        tol,
    )?;
    Ok(est.value)
}

/// `C(t)` for `t ≥ 0`: closed form at absolute zero, quadrature otherwise.
pub fn bath_correlation(t: f64, sd: &SpectralDensity, temp: Temperature) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    sd.validate()?;
    temp.validate()?;
    match temp {
        Temperature::Zero => Ok(bath_correlation_zero_t(t, sd)),
        Temperature::Beta(_) => bath_correlation_quadrature(t, sd, temp),
    }
}

/// Influence-functional coefficients on a uniform grid of width `dt`.
///
/// `eta_self = ∫_0^dt dt' ∫_0^t' dt'' C(t'-t'')` and, for lag `k ≥ 1`,
/// `eta_k = ∫_{k dt}^{(k+1) dt} dt' ∫_0^dt dt'' C(t'-t'')`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaTable {
    pub dt: f64,
    pub n_steps: usize,
    pub eta_self: Complex64,
    /// `eta[k - 1]` holds lag `k`.
    pub eta: Vec<Complex64>,
}

impl EtaTable {
    /// Coefficient for lag `k`, with `k = 0` the self-interaction.
    pub fn lag(&self, k: usize) -> Result<Complex64> {
        match k {
            0 => Ok(self.eta_self),
            k if k <= self.n_steps => Ok(self.eta[k - 1]),
            k => Err(Error::Domain(format!(
                "lag {k} outside table of {} steps",
                self.n_steps
            ))),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.eta_self.is_finite() && self.eta.iter().all(|e| e.is_finite())
    }
}

fn eta_tolerance(sd: &SpectralDensity, dt: f64) -> Tolerance {
    let scale = sd.kernel_prefactor().abs() * dt * dt;
    Tolerance::new(1e-15 * scale, 1e-12)
}

/// Hat-weighted time integral of the closed-form kernel for one lag.
fn eta_zero_t(k: usize, sd: &SpectralDensity, dt: f64, tol: Tolerance) -> Result<Complex64> {
    let c = |tau: f64| bath_correlation_zero_t(tau, sd);
    if k == 0 {
        let e = quad::integrate(|tau: f64| c(tau) * (dt - tau), 0.0, dt, tol)?;
        return Ok(e.value);
    }
    let center = k as f64 * dt;
    let e = quad::integrate_pieces(
        |tau: f64| c(tau) * (dt - (tau - center).abs()),
        &[center - dt, center, center + dt],
        tol,
    )?;
    Ok(e.value)
}

/// One coefficient from the frequency representation, with both time
/// integrals done analytically.
pub fn eta_spectral(
    k: usize,
    sd: &SpectralDensity,
    temp: Temperature,
    dt: f64,
) -> Result<Complex64> {
    let tol = eta_tolerance(sd, dt);
    let kf = k as f64;
    let integrand = |w: f64| -> Complex64 {
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let g_over_w2 = sd.eval_unchecked(w) / (w * w);
        let coth = temp.coth_factor(w);
        if k == 0 {
            // (1 - cos ω dt) coth + i (sin ω dt - ω dt)
            let half = 0.5 * w * dt;
            let re = 2.0 * half.sin().powi(2) * coth;
            let x = w * dt;
            // sin x - x without cancellation for small x
            let im = if x < 1e-2 {
                let x2 = x * x;
                -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
            } else {
                x.sin() - x
            };
            Complex64::new(re, im) * g_over_w2
        } else {
            let hat = 4.0 * (0.5 * w * dt).sin().powi(2);
            let (sin, cos) = (kf * w * dt).sin_cos();
            Complex64::new(coth * cos, -sin) * (g_over_w2 * hat)
        }
    };
    let e = quad::integrate_pieces(integrand, &sd.frequency_breaks(), tol)?;
    Ok(e.value)
}

/// Coefficients for lags `0..=n_steps`. Zero temperature integrates the
/// closed-form kernel in time; finite temperature uses the frequency route.
pub fn eta_coefficients(
    sd: &SpectralDensity,
    temp: Temperature,
    dt: f64,
    n_steps: usize,
) -> Result<EtaTable> {
    sd.validate()?;
    temp.validate()?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("dt must be > 0, got {dt}")));
    }
    if n_steps == 0 {
        return Err(Error::Domain("n_steps must be >= 1".into()));
    }
    let tol = eta_tolerance(sd, dt);
    let coeff = |k: usize| match temp {
        Temperature::Zero => eta_zero_t(k, sd, dt, tol),
        Temperature::Beta(_) => eta_spectral(k, sd, temp, dt),
    };
    let eta_self = coeff(0)?;
    let eta = (1..=n_steps).map(coeff).collect::<Result<Vec<_>>>()?;
    let table = EtaTable {
        dt,
        n_steps,
        eta_self,
        eta,
    };
    if !table.is_finite() {
        return Err(Error::numerical(
            "non-finite influence coefficient",
            f64::NAN,
        ));
    }
    Ok(table)
}
