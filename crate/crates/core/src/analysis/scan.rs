use serde::{Deserialize, Serialize};

use super::minimum::{detect_minimum, MinimumReport, DEFAULT_P_MIN};
use crate::bath::SpectralDensity;
use crate::error::{Error, Result};
use crate::ibm::effective_tunneling;
use crate::tempo::{propagate, SystemConfig, TempoParams};

/// Observation window used for the boundary scans: `3Δ^{-1}` for
/// `s ≤ 1.3`, `Δ^{-1}` above.
pub fn default_t_max(s: f64, delta: f64) -> f64 {
    if s <= 1.3 {
        3.0 / delta
    } else {
        1.0 / delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub t_max: f64,
    pub p_min: f64,
    /// Stop once the bracket is at most this wide.
    pub tolerance: f64,
}

impl ScanSettings {
    pub fn new(alpha_lo: f64, alpha_hi: f64, t_max: f64) -> Self {
        Self {
            alpha_lo,
            alpha_hi,
            t_max,
            p_min: DEFAULT_P_MIN,
            tolerance: 0.01,
        }
    }

    pub fn with_p_min(self, p_min: f64) -> Self {
        Self { p_min, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.alpha_lo && self.alpha_lo < self.alpha_hi && self.alpha_hi.is_finite()) {
            return Err(Error::Config(format!(
                "alpha range must satisfy 0 <= lo < hi, got [{}, {}]",
                self.alpha_lo, self.alpha_hi
            )));
        }
        if !(self.t_max > 0.0) || !(self.tolerance > 0.0) || !(self.p_min >= 0.0) {
            return Err(Error::Config(
                "t_max and tolerance must be > 0, p_min >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// One evaluation of the minimum predicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub alpha: f64,
    pub minimum: MinimumReport,
    pub max_bond: usize,
    pub truncation_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseBoundaryPoint {
    pub s: f64,
    pub alpha_b: f64,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub t_max: f64,
    pub p_min: f64,
    pub dt: f64,
    pub omega_c: f64,
    pub svd_cutoff: f64,
    /// Every probe, in evaluation order.
    pub probes: Vec<Probe>,
}

/// Run TEMPO at coupling `alpha` over `[0, t_max]` and test for the minimum.
pub fn probe_minimum(
    alpha: f64,
    bath: &SpectralDensity,
    system: &SystemConfig,
    params: &TempoParams,
    t_max: f64,
    p_min: f64,
) -> Result<Probe> {
    let sd = bath.with_alpha(alpha);
    let n_steps = (t_max / params.dt - 1e-9).ceil().max(1.0) as usize;
    let p = TempoParams {
        n_steps,
        memory_length: params.memory_length.map(|k| k.min(n_steps)),
        ..*params
    };
    let traj = propagate(system, &sd, &p)?;
    Ok(Probe {
        alpha,
        minimum: detect_minimum(&traj, t_max, p_min)?,
        max_bond: traj.max_bond_dims.iter().copied().max().unwrap_or(1),
        truncation_error: traj.truncation_error.last().copied().unwrap_or(0.0),
    })
}

/// Bisect in `α` for the onset of the pseudo-coherent minimum at exponent
/// `s` (overriding `bath.s`).
///
/// Both ends of the range are probed first, concurrently; the bisection
/// itself is sequential so the result does not depend on thread count.
pub fn scan_alpha_b(
    s: f64,
    bath: &SpectralDensity,
    system: &SystemConfig,
    params: &TempoParams,
    settings: &ScanSettings,
) -> Result<PhaseBoundaryPoint> {
    settings.validate()?;
    let bath = SpectralDensity { s, ..*bath };
    bath.with_alpha(settings.alpha_hi).validate()?;

    // Refuse windows long enough to contain the ordinary half-period minimum.
    if let Ok(delta_eff) = effective_tunneling(settings.alpha_lo, s, system.delta) {
        if delta_eff > 0.0 && std::f64::consts::PI / delta_eff < settings.t_max {
            return Err(Error::Scan(format!(
                "window t_max = {} exceeds the half period π/Δ_eff = {:.4} at alpha_lo = {}; \
                 a free-oscillation minimum would be detected",
                settings.t_max,
                std::f64::consts::PI / delta_eff,
                settings.alpha_lo
            )));
        }
    }

    let run =
        |alpha: f64| probe_minimum(alpha, &bath, system, params, settings.t_max, settings.p_min);
    let (lo, hi) = rayon::join(|| run(settings.alpha_lo), || run(settings.alpha_hi));
    let (lo, hi) = (lo?, hi?);
    if lo.minimum.found || !hi.minimum.found {
        return Err(Error::Scan(format!(
            "range does not bracket the onset at s = {s}: minimum found = {} at alpha = {} \
             (prominence {:.3e}), found = {} at alpha = {} (prominence {:.3e}), p_min = {:e}",
            lo.minimum.found,
            lo.alpha,
            lo.minimum.prominence,
            hi.minimum.found,
            hi.alpha,
            hi.minimum.prominence,
            settings.p_min
        )));
    }
    let mut probes = vec![lo, hi];
    let (mut a, mut b) = (settings.alpha_lo, settings.alpha_hi);
    while b - a > settings.tolerance {
        let mid = 0.5 * (a + b);
        let p = run(mid)?;
        if p.minimum.found {
            b = mid;
        } else {
            a = mid;
        }
        probes.push(p);
    }
    Ok(PhaseBoundaryPoint {
        s,
        alpha_b: 0.5 * (a + b),
        alpha_lo: a,
        alpha_hi: b,
        t_max: settings.t_max,
        p_min: settings.p_min,
        dt: params.dt,
        omega_c: bath.omega_c,
        svd_cutoff: params.svd_cutoff,
        probes,
    })
}

/// Re-run the predicate at `α_B ∓ offset`; returns the two probes, which
/// should read (absent, present).
pub fn verify_bracket(
    point: &PhaseBoundaryPoint,
    offset: f64,
    bath: &SpectralDensity,
    system: &SystemConfig,
    params: &TempoParams,
) -> Result<(Probe, Probe)> {
    let bath = SpectralDensity {
        s: point.s,
        ..*bath
    };
    let run = |alpha: f64| probe_minimum(alpha, &bath, system, params, point.t_max, point.p_min);
    let (below, above) = rayon::join(
        || run((point.alpha_b - offset).max(0.0)),
        || run(point.alpha_b + offset),
    );
    Ok((below?, above?))
}

/// Convert a coupling quoted with the coupling operator `½σ_z` to the
/// convention used here (`σ_z`): the spectral weight scales with the square
/// of the prefactor, so `α = α_ref / 4`.
pub fn half_coupling_to_full(alpha_ref: f64) -> f64 {
    alpha_ref / 4.0
}
