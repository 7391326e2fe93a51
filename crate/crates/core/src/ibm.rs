//! Closed-form results: pure-dephasing decay of the independent-boson model,
//! weak-coupling renormalization of the spin-boson model and the
//! overdamping boundary of the pure-dephasing bath.

use std::f64::consts::PI;

use crate::special::{digamma, gamma};
use serde::{Deserialize, Serialize};

use crate::bath::{SpectralDensity, Temperature};
use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

/// Smallest accepted `s − 1` for quantities that carry `Γ(s − 1)`.
pub const MIN_SUPER_OHMIC_EXCESS: f64 = 1e-6;

fn require_super_ohmic(s: f64) -> Result<()> {
    if !(s >= 1.0 + MIN_SUPER_OHMIC_EXCESS) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "s = {s}: Γ(s − 1) diverges as s → 1⁺; super-Ohmic formulas need s ≥ 1 + {MIN_SUPER_OHMIC_EXCESS:e}"
        )));
    }
    Ok(())
}

/// Effective coupling `α̃ = 8 α Γ(s − 1)`.
pub fn alpha_tilde(alpha: f64, s: f64) -> Result<f64> {
    require_super_ohmic(s)?;
    if alpha < 0.0 {
        return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
    }
    Ok(8.0 * alpha * gamma(s - 1.0))
}

/// `α̃` including a non-default normalization frequency, `8 α Γ(s−1) (ω_c/ω_s)^{s−1}`.
fn alpha_tilde_sd(sd: &SpectralDensity) -> Result<f64> {
    Ok(alpha_tilde(sd.alpha, sd.s)? * (sd.omega_c / sd.omega_s).powf(sd.s - 1.0))
}

/// Renormalized tunneling `Δ exp(−α̃)`; independent of `ω_c`.
pub fn effective_tunneling(alpha: f64, s: f64, delta: f64) -> Result<f64> {
    Ok(delta * (-alpha_tilde(alpha, s)?).exp())
}

/// One-phonon damping rate `(π/2) α Δ_eff² / ω_c` (ohmic exponent `s = 2`, `T = 0`).
pub fn one_phonon_rate(alpha: f64, delta_eff: f64, omega_c: f64) -> f64 {
    0.5 * PI * alpha * delta_eff * delta_eff / omega_c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakCouplingPrediction {
    pub alpha_tilde: f64,
    pub delta_eff: f64,
    pub gamma_eff: f64,
}

impl WeakCouplingPrediction {
    pub fn new(sd: &SpectralDensity, delta: f64) -> Result<Self> {
        let alpha_tilde = alpha_tilde(sd.alpha, sd.s)?;
        let delta_eff = delta * (-alpha_tilde).exp();
        Ok(Self {
            alpha_tilde,
            delta_eff,
            gamma_eff: one_phonon_rate(sd.alpha, delta_eff, sd.omega_c),
        })
    }
}

/// `Γ₀(t) = α̃ {1 − cos[(s−1) atan(ω_c t)] / [1 + (ω_c t)²]^{(s−1)/2}}`.
pub fn decay_function_zero_t(t: f64, sd: &SpectralDensity) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    let at = alpha_tilde_sd(sd)?;
    let x = sd.omega_c * t;
    // 1 − Re exp(z) with z = −(s−1)[ln(1+x²)/2 + i atan x], written to avoid
    // cancellation at small x.
    let p = sd.s - 1.0;
    let a = -p * 0.5 * (x * x).ln_1p();
    let b = -p * x.atan();
    let half = 0.5 * b;
    Ok(at * (2.0 * half.sin() * half.sin() - a.exp_m1() * b.cos()))
}

/// `Γ_T(t) = 4 ∫ dω G(ω)/ω² (1 − cos ωt) coth(βω/2)` by adaptive quadrature,
/// at any temperature.
pub fn decay_function_quadrature(t: f64, sd: &SpectralDensity, temp: Temperature) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    sd.validate()?;
    temp.validate()?;
    if t == 0.0 {
        return Ok(0.0);
    }
    // Absolute floor relative to the zero-temperature plateau scale.
    let scale = 8.0 * sd.alpha * sd.omega_c.powf(sd.s - 1.0) * sd.omega_s.powf(1.0 - sd.s);
    let tol = Tolerance::new(1e-15 * scale, 1e-11);
    let est = quad::integrate_pieces(
        |w: f64| {
            if w == 0.0 {
                return 0.0;
            }
            let h = (0.5 * w * t).sin();
            4.0 * sd.eval_unchecked(w) / (w * w) * 2.0 * h * h * temp.coth_factor(w)
        },
        &sd.frequency_breaks(),
        tol,
    )?;
    Ok(est.value)
}

/// Pure-dephasing decay function; closed form at absolute zero.
pub fn decay_function(t: f64, sd: &SpectralDensity, temp: Temperature) -> Result<f64> {
    match temp {
        Temperature::Zero => decay_function_zero_t(t, sd),
        Temperature::Beta(_) => decay_function_quadrature(t, sd, temp),
    }
}

/// `P_z(t) = ½ cos(Δt) e^{−Γ_T(t)}` of the independent-boson model.
pub fn ibm_polarization(
    t: f64,
    delta: f64,
    sd: &SpectralDensity,
    temp: Temperature,
) -> Result<f64> {
    let decay = if sd.alpha == 0.0 {
        0.0
    } else {
        decay_function(t, sd, temp)?
    };
    Ok(0.5 * (delta * t).cos() * (-decay).exp())
}

/// Overdamping boundary `α_o(s) = 1/(8 Γ(s − 1))`, where `α̃` reaches one.
pub fn overdamping_boundary(s: f64) -> Result<f64> {
    require_super_ohmic(s)?;
    Ok(1.0 / (8.0 * gamma(s - 1.0)))
}

/// Location and height of the maximum of `α_o(s)`, i.e. the minimum of
/// `Γ(s − 1)`, from the root of the digamma function.
pub fn overdamping_peak() -> (f64, f64) {
    let (mut lo, mut hi) = (1.2, 1.8);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if digamma(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let s = 1.0 + 0.5 * (lo + hi);
    (s, 1.0 / (8.0 * gamma(s - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sd(alpha: f64, s: f64) -> SpectralDensity {
        SpectralDensity::new(alpha, s, 10.0).unwrap()
    }

    #[test]
    fn gamma_accuracy() {
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(1.5), 0.5 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(4.0), 6.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(9.0), 40320.0, max_relative = 1e-13);
        assert_relative_eq!(gamma(0.1), 9.513507698668731836, max_relative = 1e-13);
    }

    #[test]
    fn effective_tunneling_values() {
        assert_eq!(effective_tunneling(0.0, 2.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            effective_tunneling(0.1, 2.0, 1.0).unwrap(),
            0.449328964117,
            max_relative = 1e-11
        );
        assert_relative_eq!(
            effective_tunneling(0.1, 3.0, 1.0).unwrap(),
            0.449328964117,
            max_relative = 1e-11
        );
        assert!(matches!(
            effective_tunneling(0.1, 1.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(effective_tunneling(0.1, 1.0 + 1e-7, 1.0).is_err());
    }

    #[test]
    fn one_phonon_rate_values() {
        let de = effective_tunneling(0.1, 2.0, 1.0).unwrap();
        assert_relative_eq!(
            one_phonon_rate(0.1, de, 10.0),
            3.1714e-3,
            max_relative = 1e-4
        );
        assert_relative_eq!(
            one_phonon_rate(0.1, de, 20.0),
            1.5857e-3,
            max_relative = 1e-4
        );
        assert_eq!(one_phonon_rate(0.0, de, 10.0), 0.0);
        let p = WeakCouplingPrediction::new(&sd(0.1, 2.0), 1.0).unwrap();
        assert_relative_eq!(p.alpha_tilde, 0.8, max_relative = 1e-14);
    }

    #[test]
    fn decay_function_zero_t_values() {
        let sd = sd(0.1, 2.0);
        assert_eq!(decay_function_zero_t(0.0, &sd).unwrap(), 0.0);
        assert_relative_eq!(
            decay_function_zero_t(0.1, &sd).unwrap(),
            0.4,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            decay_function_zero_t(1e6, &sd).unwrap(),
            0.8,
            max_relative = 1e-9
        );
        assert!(
            decay_function_zero_t(0.1, &SpectralDensity::new(0.1, 1.0, 10.0).unwrap()).is_err()
        );
    }

    #[test]
    fn short_time_law() {
        for s in [1.5, 2.0, 2.5, 3.0, 4.0] {
            let sd = sd(0.1, s);
            let t = 1e-6;
            let ratio = decay_function_zero_t(t, &sd).unwrap() / (t * t);
            let expected = 4.0 * 0.1 * gamma(s + 1.0) * 100.0;
            assert_relative_eq!(ratio, expected, max_relative = 1e-8);
        }
    }

    #[test]
    fn monotone_approach_to_plateau_up_to_ohmic_exponent_two() {
        for s in [1.1, 1.5, 1.8, 2.0] {
            let sd = sd(0.2, s);
            let at = alpha_tilde(0.2, s).unwrap();
            let mut prev = 0.0;
            for i in 0..20_000 {
                let g = decay_function_zero_t(i as f64 * 1e-3, &sd).unwrap();
                assert!(g >= prev - 1e-15 && g <= at * (1.0 + 1e-12), "s={s} i={i}");
                prev = g;
            }
        }
    }

    #[test]
    fn overshoot_beyond_exponent_two() {
        // cos[(s−1) atan x] turns negative once (s−1) atan x > π/2.
        let sd = sd(0.2, 3.0);
        let at = alpha_tilde(0.2, 3.0).unwrap();
        assert!(decay_function_zero_t(0.2, &sd).unwrap() > at);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let sd = sd(0.2, 2.0);
        for x in [0.01, 0.5, 1.0, 7.0, 40.0] {
            let t = x / sd.omega_c;
            let q = decay_function_quadrature(t, &sd, Temperature::Zero).unwrap();
            let c = decay_function_zero_t(t, &sd).unwrap();
            assert_relative_eq!(q, c, max_relative = 1e-9);
        }
    }

    #[test]
    fn finite_temperature_decays_faster() {
        let sd = sd(0.1, 2.0);
        assert_eq!(
            decay_function(0.0, &sd, Temperature::Beta(1.0)).unwrap(),
            0.0
        );
        let hot = decay_function(1.0, &sd, Temperature::Beta(1.0)).unwrap();
        let cold = decay_function(1.0, &sd, Temperature::Zero).unwrap();
        assert!(hot > cold);
    }

    #[test]
    fn polarization() {
        let sd = sd(0.2, 2.0);
        assert_eq!(
            ibm_polarization(0.0, 1.0, &sd, Temperature::Zero).unwrap(),
            0.5
        );
        let free = ibm_polarization(2.0, 1.0, &sd.with_alpha(0.0), Temperature::Zero).unwrap();
        assert_eq!(free, 0.5 * 2.0f64.cos());
        // Envelope at t = nπ/Δ after the plateau is reached.
        let p = ibm_polarization(3.0 * PI, 1.0, &sd, Temperature::Zero).unwrap();
        assert_relative_eq!(p.abs(), 0.5 * (-1.6f64).exp(), max_relative = 1e-3);
        assert_relative_eq!(0.5 * (-1.6f64).exp(), 0.1009, max_relative = 1e-3);
    }

    #[test]
    fn overdamping_boundary_values() {
        assert_eq!(overdamping_boundary(2.0).unwrap(), 0.125);
        assert_relative_eq!(
            overdamping_boundary(4.0).unwrap(),
            0.0625,
            max_relative = 1e-14
        );
        assert!(overdamping_boundary(0.9).is_err());
        for s in [1.3, 2.2, 3.7, 6.0] {
            assert_relative_eq!(
                overdamping_boundary(s).unwrap() * 8.0 * gamma(s - 1.0),
                1.0,
                max_relative = 1e-15
            );
        }
        let (s_star, peak) = overdamping_peak();
        assert!((s_star - 2.461632144968362).abs() < 1e-9, "{s_star}");
        assert!((peak - 0.14117).abs() < 5e-5, "{peak}");
    }
}
