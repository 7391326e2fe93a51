//! TOML run configuration. Sections mirror the library types.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{default_t_max, ScanSettings, DEFAULT_P_MIN};
use crate::bath::{SpectralDensity, Temperature};
use crate::error::{Error, Result};
use crate::tempo::{DensityMatrix, SystemConfig, TempoParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Single,
    SweepAlpha,
    ScanBoundary,
    IbmAnalytic,
    Asymmetric,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Single => "single",
            Mode::SweepAlpha => "sweep-alpha",
            Mode::ScanBoundary => "scan-boundary",
            Mode::IbmAnalytic => "ibm-analytic",
            Mode::Asymmetric => "asymmetric",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub bias: f64,
    /// Initial polarizations `(P_x, P_y, P_z)`.
    #[serde(default = "spin_up")]
    pub rho0: [f64; 3],
    /// Inverse temperature; absent means `T = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            delta: 1.0,
            phi: 0.0,
            bias: 0.0,
            rho0: spin_up(),
            beta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "two")]
    pub s: f64,
    #[serde(default = "ten")]
    pub omega_c: f64,
    /// Defaults to `omega_c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_s: Option<f64>,
}

impl Default for BathSection {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            s: 2.0,
            omega_c: 10.0,
            omega_s: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TempoSection {
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Propagation end time; ignored by boundary scans, which use the scan window.
    #[serde(default = "three")]
    pub t_max: f64,
    #[serde(default = "default_cutoff")]
    pub svd_cutoff: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_bond: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_length: Option<usize>,
}

impl Default for TempoSection {
    fn default() -> Self {
        Self {
            dt: default_dt(),
            t_max: 3.0,
            svd_cutoff: default_cutoff(),
            max_bond: None,
            memory_length: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// Exponents for boundary scans.
    #[serde(default)]
    pub s_grid: Vec<f64>,
    /// Couplings for `sweep-alpha`.
    #[serde(default)]
    pub alpha_grid: Vec<f64>,
    #[serde(default = "default_alpha_lo")]
    pub alpha_lo: f64,
    #[serde(default = "default_alpha_hi")]
    pub alpha_hi: f64,
    /// Fixed window; absent selects 3Δ⁻¹ for s ≤ 1.3 and Δ⁻¹ above.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default = "default_p_min")]
    pub p_min: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            s_grid: Vec::new(),
            alpha_grid: Vec::new(),
            alpha_lo: default_alpha_lo(),
            alpha_hi: default_alpha_hi(),
            t_max: None,
            p_min: default_p_min(),
            tolerance: default_tolerance(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Overrides the derived run directory name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub bath: BathSection,
    #[serde(default)]
    pub tempo: TempoSection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn three() -> f64 {
    3.0
}
fn ten() -> f64 {
    10.0
}
fn spin_up() -> [f64; 3] {
    [0.0, 0.0, 0.5]
}
fn default_dt() -> f64 {
    0.005
}
fn default_cutoff() -> f64 {
    1e-9
}
fn default_alpha_lo() -> f64 {
    0.3
}
fn default_alpha_hi() -> f64 {
    1.5
}
fn default_p_min() -> f64 {
    DEFAULT_P_MIN
}
fn default_tolerance() -> f64 {
    0.01
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            system: SystemSection::default(),
            bath: BathSection::default(),
            tempo: TempoSection::default(),
            scan: ScanSection::default(),
            output: OutputSection::default(),
        }
    }

    /// Parse TOML, or the `config` field of a JSON metadata sidecar.
    pub fn from_str_any(text: &str, json: bool) -> Result<Self> {
        let cfg: RunConfig = if json {
            let value: serde_json::Value = serde_json::from_str(text)
                .map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
            let inner = value.get("config").cloned().unwrap_or(value);
            serde_json::from_value(inner)
                .map_err(|e| Error::Config(format!("invalid config in JSON: {e}")))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(format!("invalid TOML: {e}")))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let json = path.extension().is_some_and(|e| e == "json");
        Self::from_str_any(&text, json)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn temperature(&self) -> Temperature {
        match self.system.beta {
            Some(b) => Temperature::Beta(b),
            None => Temperature::Zero,
        }
    }

    /// In `asymmetric` mode the rotation is folded into the Hamiltonian
    /// (`Δ' = Δ cos φ`, `ε' = Δ sin φ + ε`, `φ = 0`), so `rho0` and all
    /// reported polarizations refer to the transformed basis.
    pub fn system_config(&self) -> Result<SystemConfig> {
        let [px, py, pz] = self.system.rho0;
        let sys = &self.system;
        let (delta, phi, bias) = match self.mode {
            Mode::Asymmetric => (
                sys.delta * sys.phi.cos(),
                0.0,
                sys.delta * sys.phi.sin() + sys.bias,
            ),
            _ => (sys.delta, sys.phi, sys.bias),
        };
        let cfg = SystemConfig {
            delta,
            phi,
            bias,
            rho0: DensityMatrix::from_polarization(px, py, pz),
            temperature: self.temperature(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn spectral_density(&self) -> Result<SpectralDensity> {
        let b = &self.bath;
        let sd = SpectralDensity::with_normalization(
            b.alpha,
            b.s,
            b.omega_c,
            b.omega_s.unwrap_or(b.omega_c),
        )
        .map_err(|e| Error::Config(e.to_string()))?;
        Ok(sd)
    }

    pub fn tempo_params(&self) -> Result<TempoParams> {
        let t = &self.tempo;
        if !(t.t_max > 0.0) || !t.t_max.is_finite() {
            return Err(Error::Config(format!(
                "tempo.t_max must be > 0, got {}",
                t.t_max
            )));
        }
        let mut p = TempoParams::until(t.t_max, t.dt).with_cutoff(t.svd_cutoff);
        p.max_bond = t.max_bond;
        p.memory_length = t.memory_length.map(|k| k.min(p.n_steps.max(1)));
        p.validate()?;
        Ok(p)
    }

    pub fn scan_settings(&self, s: f64) -> ScanSettings {
        let sc = &self.scan;
        ScanSettings {
            alpha_lo: sc.alpha_lo,
            alpha_hi: sc.alpha_hi,
            t_max: sc
                .t_max
                .unwrap_or_else(|| default_t_max(s, self.system.delta)),
            p_min: sc.p_min,
            tolerance: sc.tolerance,
        }
    }

    /// Check every section used by the selected mode.
    pub fn validate(&self) -> Result<()> {
        self.system_config()?;
        self.spectral_density()?;
        if !(self.tempo.dt > 0.0) || !(self.tempo.svd_cutoff > 0.0 && self.tempo.svd_cutoff < 1.0) {
            return Err(Error::Config(
                "tempo.dt must be > 0 and 0 < svd_cutoff < 1".into(),
            ));
        }
        match self.mode {
            Mode::Single | Mode::Asymmetric | Mode::IbmAnalytic => {
                self.tempo_params()?;
            }
            Mode::SweepAlpha => {
                self.tempo_params()?;
                if self.scan.alpha_grid.is_empty() {
                    return Err(Error::Config("scan.alpha_grid is empty".into()));
                }
                if self.scan.alpha_grid.iter().any(|a| !(*a >= 0.0)) {
                    return Err(Error::Config("scan.alpha_grid entries must be >= 0".into()));
                }
            }
            Mode::ScanBoundary => {
                if self.scan.s_grid.is_empty() {
                    return Err(Error::Config("scan.s_grid is empty".into()));
                }
                if let Some(s) = self
                    .scan
                    .s_grid
                    .iter()
                    .find(|s| !(**s >= 1.0) || !s.is_finite())
                {
                    return Err(Error::Config(format!(
                        "scan.s_grid entries must be >= 1, got {s}"
                    )));
                }
                for &s in &self.scan.s_grid {
                    self.scan_settings(s).validate()?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_toml_uses_defaults() {
        let cfg =
            RunConfig::from_str_any("mode = \"single\"\n[bath]\nalpha = 0.1\n", false).unwrap();
        assert_eq!(cfg.bath.omega_c, 10.0);
        assert_eq!(cfg.tempo.dt, 0.005);
        assert_eq!(cfg.system.rho0, [0.0, 0.0, 0.5]);
        assert_eq!(cfg.temperature(), Temperature::Zero);
    }

    #[test]
    fn round_trips_through_toml_and_json() {
        let mut cfg = RunConfig::new(Mode::ScanBoundary);
        cfg.scan.s_grid = vec![1.5, 2.0];
        cfg.system.beta = Some(5.0);
        let back = RunConfig::from_str_any(&cfg.to_toml(), false).unwrap();
        assert_eq!(back, cfg);
        let json = serde_json::json!({ "config": cfg, "version": "x" }).to_string();
        assert_eq!(RunConfig::from_str_any(&json, true).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::from_str_any("mode = \"single\"\nbogus = 1\n", false).is_err());
        assert!(RunConfig::from_str_any("mode = \"teleport\"\n", false).is_err());
        assert!(RunConfig::from_str_any("mode = \"scan-boundary\"\n", false).is_err());
        assert!(RunConfig::from_str_any("mode = \"single\"\n[tempo]\ndt = -1.0\n", false).is_err());
        assert!(RunConfig::from_str_any(
            "mode = \"single\"\n[system]\nrho0 = [0.5, 0.5, 0.5]\n",
            false
        )
        .is_err());
        assert!(
            RunConfig::from_str_any("mode = \"single\"\n[bath]\nalpha = -0.1\n", false).is_err()
        );
    }
}
