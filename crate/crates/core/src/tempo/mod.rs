//! Reduced two-state dynamics from the discretized influence functional,
//! with the augmented path tensor stored as a compressed matrix-product
//! state.
//!
//! The lab-frame Hamiltonian is
//! `H = (Δ/2) σ_x + (sin φ σ_x + cos φ σ_z) X + H_B`. Internally everything
//! runs in the rotated frame where the bath couples through `σ_z`:
//!
//! ```text
//! H' = (Δ/2) cos φ σ_x + [(Δ/2) sin φ + ε/2] σ_z + σ_z X + H_B
//! ```
//!
//! `ρ(0)` is given in the lab frame and the reported polarizations
//! `P_j = <σ_j>/2` are rotated back to it. With `φ = 0` both frames coincide,
//! so a biased model can also be specified directly through `(Δ, ε)`.

mod liouville;
mod mps;
mod propagate;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::{SpectralDensity, Temperature};
use crate::error::{Error, Result};

pub use liouville::{
    coupling_frame_rotation, free_propagator, influence_tensor, lab_polarizations, Superoperator,
    LIOUVILLE_DIM,
};
pub use mps::{compress, PathState, SiteTensor};
pub use propagate::propagate;

/// A 2×2 density matrix in the `σ_z` eigenbasis (`|↑>` first).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix(pub [[Complex64; 2]; 2]);

impl DensityMatrix {
    /// State with polarizations `P_j = <σ_j>/2`.
    pub fn from_polarization(px: f64, py: f64, pz: f64) -> Self {
        let c = Complex64::new;
        DensityMatrix([
            [c(0.5 + pz, 0.0), c(px, -py)],
            [c(px, py), c(0.5 - pz, 0.0)],
        ])
    }

    /// `½(1 + σ_z)`.
    pub fn spin_up() -> Self {
        Self::from_polarization(0.0, 0.0, 0.5)
    }

    pub fn polarization(&self) -> [f64; 3] {
        let r01 = self.0[0][1];
        [r01.re, -r01.im, 0.5 * (self.0[0][0].re - self.0[1][1].re)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.0;
        let tol = 1e-10;
        let herm = (m[0][1] - m[1][0].conj()).norm() <= tol
            && m[0][0].im.abs() <= tol
            && m[1][1].im.abs() <= tol;
        if !herm {
            return Err(Error::Config(
                "initial density matrix is not Hermitian".into(),
            ));
        }
        if (self.trace().re - 1.0).abs() > tol {
            return Err(Error::Config(format!(
                "initial density matrix has trace {}",
                self.trace().re
            )));
        }
        let [px, py, pz] = self.polarization();
        if px * px + py * py + pz * pz > 0.25 + tol {
            return Err(Error::Config(
                "initial density matrix is not positive semidefinite".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Tunneling amplitude `Δ`.
    pub delta: f64,
    /// Coupling mixing angle: `u_x = sin φ`, `u_z = cos φ`.
    pub phi: f64,
    /// Extra asymmetry `ε`, entering as `(ε/2) σ_z` in the rotated frame.
    pub bias: f64,
    pub rho0: DensityMatrix,
    pub temperature: Temperature,
}

impl SystemConfig {
    /// Symmetric spin-boson model at `T = 0`, prepared in `½(1 + σ_z)`.
    pub fn spin_boson(delta: f64) -> Self {
        Self {
            delta,
            phi: 0.0,
            bias: 0.0,
            rho0: DensityMatrix::spin_up(),
            temperature: Temperature::Zero,
        }
    }

    /// Independent-boson model (`φ = π/2`).
    pub fn independent_boson(delta: f64) -> Self {
        Self {
            phi: std::f64::consts::FRAC_PI_2,
            ..Self::spin_boson(delta)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() || !self.bias.is_finite() {
            return Err(Error::Config("delta and bias must be finite".into()));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&self.phi) {
            return Err(Error::Config(format!(
                "phi must lie in [0, π/2], got {}",
                self.phi
            )));
        }
        self.rho0.validate()?;
        self.temperature.validate()
    }

    /// `(h_x, h_z)` of the rotated-frame system Hamiltonian `h_x σ_x + h_z σ_z`.
    pub fn rotated_fields(&self) -> (f64, f64) {
        let (sin, cos) = self.phi.sin_cos();
        (
            0.5 * self.delta * cos,
            0.5 * self.delta * sin + 0.5 * self.bias,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TempoParams {
    pub dt: f64,
    pub n_steps: usize,
    /// Singular values below `svd_cutoff · σ_max` are discarded.
    pub svd_cutoff: f64,
    pub max_bond: Option<usize>,
    /// Longest retained memory lag; `None` keeps the full history.
    pub memory_length: Option<usize>,
}

impl TempoParams {
    pub fn new(dt: f64, n_steps: usize) -> Self {
        Self {
            dt,
            n_steps,
            svd_cutoff: 1e-9,
            max_bond: None,
            memory_length: None,
        }
    }

    /// Grid covering `[0, t_max]` with step `dt` (rounded to whole steps).
    pub fn until(t_max: f64, dt: f64) -> Self {
        Self::new(dt, (t_max / dt).round() as usize)
    }

    pub fn with_cutoff(self, svd_cutoff: f64) -> Self {
        Self { svd_cutoff, ..self }
    }

    pub fn with_memory(self, memory_length: usize) -> Self {
        Self {
            memory_length: Some(memory_length),
            ..self
        }
    }

    pub fn with_max_bond(self, max_bond: usize) -> Self {
        Self {
            max_bond: Some(max_bond),
            ..self
        }
    }

    pub fn memory(&self) -> usize {
        self.memory_length
            .unwrap_or(self.n_steps)
            .min(self.n_steps)
            .max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be >= 1".into()));
        }
        if !(self.svd_cutoff > 0.0 && self.svd_cutoff < 1.0) {
            return Err(Error::Config(format!(
                "svd_cutoff must lie in (0, 1), got {}",
                self.svd_cutoff
            )));
        }
        if self.max_bond == Some(0) {
            return Err(Error::Config("max_bond must be >= 1".into()));
        }
        match self.memory_length {
            Some(0) => Err(Error::Config("memory_length must be >= 1".into())),
            Some(k) if k > self.n_steps => Err(Error::Config(format!(
                "memory_length {k} exceeds n_steps {}",
                self.n_steps
            ))),
            _ => Ok(()),
        }
    }
}

/// Polarization time series with the settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub px: Vec<f64>,
    pub py: Vec<f64>,
    pub pz: Vec<f64>,
    /// Trace of the reduced density matrix at each time.
    pub trace: Vec<f64>,
    /// Accumulated relative truncation error at each time.
    pub truncation_error: Vec<f64>,
    /// Largest bond dimension of the path state at each time.
    pub max_bond_dims: Vec<usize>,
    pub system: SystemConfig,
    pub bath: SpectralDensity,
    pub params: TempoParams,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.params.dt
    }

    /// Index of the last sample with `t ≤ t_max` (within rounding).
    pub fn index_at(&self, t_max: f64) -> usize {
        let k = (t_max / self.params.dt + 1e-9).floor() as usize;
        k.min(self.len().saturating_sub(1))
    }

    pub fn bloch_norm_sq(&self, i: usize) -> f64 {
        self.px[i].powi(2) + self.py[i].powi(2) + self.pz[i].powi(2)
    }
}
