use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tempo::Trajectory;

/// Default prominence threshold, in units of `P_z`.
pub const DEFAULT_P_MIN: f64 = 1e-4;

/// Samples per `ω_c^{-1}` required before a trajectory is searched.
pub const MIN_SAMPLES_PER_CUTOFF_TIME: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimumReport {
    pub found: bool,
    /// Sample time of the minimum, `NaN` when none was found.
    pub t_star: f64,
    pub value: f64,
    /// Largest rise after the minimum inside the window.
    pub prominence: f64,
}

impl MinimumReport {
    fn none() -> Self {
        Self {
            found: false,
            t_star: f64::NAN,
            value: f64::NAN,
            prominence: 0.0,
        }
    }
}

/// Earliest strict local minimum of `P_z` on `(0, t_max)` whose prominence
/// is at least `p_min`.
pub fn detect_minimum(traj: &Trajectory, t_max: f64, p_min: f64) -> Result<MinimumReport> {
    let samples = 1.0 / (traj.bath.omega_c * traj.dt());
    if samples < MIN_SAMPLES_PER_CUTOFF_TIME * (1.0 - 1e-9) {
        return Err(Error::Domain(format!(
            "sampling gives {samples:.1} points per cutoff time, need {MIN_SAMPLES_PER_CUTOFF_TIME}"
        )));
    }
    detect_minimum_series(&traj.times, &traj.pz, t_max, p_min)
}

/// Raw-sample version of [`detect_minimum`]; no smoothing is applied.
pub fn detect_minimum_series(
    times: &[f64],
    values: &[f64],
    t_max: f64,
    p_min: f64,
) -> Result<MinimumReport> {
    if times.len() != values.len() || times.is_empty() {
        return Err(Error::Domain(
            "time and value arrays must be non-empty and equally long".into(),
        ));
    }
    let last = times[times.len() - 1];
    let slack = 1e-9 * t_max.abs().max(1.0);
    if t_max > last + slack {
        return Err(Error::Domain(format!(
            "window t_max = {t_max} exceeds trajectory span {last}"
        )));
    }
    if !(p_min >= 0.0) {
        return Err(Error::Domain(format!("p_min must be >= 0, got {p_min}")));
    }
    // Samples inside [0, t_max]; candidate minima strictly inside (0, t_max).
    let end = times.partition_point(|&t| t <= t_max + slack);
    let y = &values[..end];
    for i in 1..end.saturating_sub(1) {
        if times[i] <= 0.0 || !(y[i] < y[i - 1] && y[i] < y[i + 1]) {
            continue;
        }
        let rise = y[i + 1..].iter().fold(f64::MIN, |m, &v| m.max(v)) - y[i];
        if rise >= p_min && rise > 0.0 {
            return Ok(MinimumReport {
                found: true,
                t_star: times[i],
                value: y[i],
                prominence: rise,
            });
        }
    }
    Ok(MinimumReport::none())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * dt).collect()
    }

    #[test]
    fn monotone_decay_has_no_minimum() {
        let t = grid(401, 0.01);
        let y: Vec<f64> = t.iter().map(|x| 0.5 * (-x).exp()).collect();
        assert!(!detect_minimum_series(&t, &y, 4.0, 0.0).unwrap().found);
    }

    #[test]
    fn cosine_minimum_at_half_period() {
        let t = grid(401, 0.01);
        let y: Vec<f64> = t.iter().map(|x| 0.5 * x.cos()).collect();
        let r = detect_minimum_series(&t, &y, 4.0, DEFAULT_P_MIN).unwrap();
        assert!(r.found);
        assert!((r.t_star - std::f64::consts::PI).abs() <= 0.005);
        assert!((r.value + 0.5).abs() < 1e-4);
        assert!((r.prominence - (0.5 + 0.5 * 4f64.cos())).abs() < 1e-4);
    }

    #[test]
    fn shallow_minimum_below_threshold_skipped() {
        let t = grid(6, 0.1);
        let y = [0.5, 0.45, 0.44999, 0.449995, 0.3, 0.2];
        assert!(!detect_minimum_series(&t, &y, 0.5, 1e-4).unwrap().found);
        let r = detect_minimum_series(&t, &y, 0.5, 0.0).unwrap();
        assert!(r.found && (r.t_star - 0.2).abs() < 1e-12);
        assert!((r.prominence - 5e-6).abs() < 1e-12);
    }

    #[test]
    fn window_beyond_span_is_an_error() {
        let t = grid(11, 0.1);
        let y = vec![0.0; 11];
        assert!(detect_minimum_series(&t, &y, 2.0, 0.0).is_err());
    }

    #[test]
    fn endpoint_is_not_a_minimum() {
        let t = grid(101, 0.01);
        let y: Vec<f64> = t.iter().map(|x| (x - 1.0).powi(2)).collect();
        assert!(!detect_minimum_series(&t, &y, 1.0, 0.0).unwrap().found);
        assert!(!detect_minimum_series(&t, &y, 0.5, 0.0).unwrap().found);
    }
}
