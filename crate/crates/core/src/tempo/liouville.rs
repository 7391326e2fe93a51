//! Liouville-space building blocks. A density matrix is flattened as
//! `v[2 i⁺ + i⁻] = ρ_{i⁺ i⁻}`, with `i = 0` the `σ_z = +1` state.

use num_complex::Complex64;

use super::{DensityMatrix, SystemConfig};
use crate::bath::EtaTable;
use crate::error::{Error, Result};

pub const LIOUVILLE_DIM: usize = 4;

pub type Superoperator = [[Complex64; LIOUVILLE_DIM]; LIOUVILLE_DIM];

type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `σ_z` eigenvalues `(s⁺, s⁻)` of Liouville index `a`.
#[inline]
pub(crate) fn branch_spins(a: usize) -> (f64, f64) {
    let s = |i: usize| if i == 0 { 1.0 } else { -1.0 };
    (s(a >> 1), s(a & 1))
}

fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn adjoint2(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// `exp(−i (h_x σ_x + h_z σ_z) t)`.
fn system_unitary(cfg: &SystemConfig, t: f64) -> Mat2 {
    let (hx, hz) = cfg.rotated_fields();
    let h = hx.hypot(hz);
    let (sin, cos) = (h * t).sin_cos();
    // sin(ht)/h → t as h → 0
    let sinc = if h == 0.0 { t } else { sin / h };
    let c = Complex64::new;
    [
        [c(cos, -sinc * hz), c(0.0, -sinc * hx)],
        [c(0.0, -sinc * hx), c(cos, sinc * hz)],
    ]
}

/// `W = exp(−i φ σ_y / 2)`, mapping rotated-frame operators to the lab frame
/// via `O_lab = W O W†`.
pub fn coupling_frame_rotation(phi: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (0.5 * phi).sin_cos();
    let r = |x: f64| Complex64::new(x, 0.0);
    [[r(c), r(-s)], [r(s), r(c)]]
}

pub(crate) fn lab_to_rotated(cfg: &SystemConfig, rho: &DensityMatrix) -> DensityMatrix {
    let w = coupling_frame_rotation(cfg.phi);
    DensityMatrix(matmul2(&adjoint2(&w), &matmul2(&rho.0, &w)))
}

/// Lab-frame polarizations from a rotated-frame density matrix.
pub fn lab_polarizations(phi: f64, rho_rotated: &DensityMatrix) -> [f64; 3] {
    let [px, py, pz] = rho_rotated.polarization();
    let (sin, cos) = phi.sin_cos();
    [cos * px + sin * pz, py, cos * pz - sin * px]
}

pub(crate) fn to_liouville(rho: &DensityMatrix) -> [Complex64; 4] {
    [rho.0[0][0], rho.0[0][1], rho.0[1][0], rho.0[1][1]]
}

pub(crate) fn from_liouville(v: &[Complex64; 4]) -> DensityMatrix {
    DensityMatrix([[v[0], v[1]], [v[2], v[3]]])
}

/// Superoperator of `ρ → U ρ U†` for the rotated-frame system Hamiltonian
/// over one interval `dt`, in the `σ_z` basis.
pub fn free_propagator(cfg: &SystemConfig, dt: f64) -> Result<Superoperator> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be > 0, got {dt}")));
    }
    cfg.validate()?;
    Ok(superoperator(&system_unitary(cfg, dt)))
}

fn superoperator(u: &Mat2) -> Superoperator {
    let mut out = [[ZERO; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            out[a][b] = u[a >> 1][b >> 1] * u[a & 1][b & 1].conj();
        }
    }
    out
}

pub(crate) fn apply(op: &Superoperator, v: &[Complex64; 4]) -> [Complex64; 4] {
    let mut out = [ZERO; 4];
    for (a, row) in op.iter().enumerate() {
        out[a] = row.iter().zip(v).map(|(x, y)| x * y).sum();
    }
    out
}

/// Pairwise influence factor between the path variable at time `j`
/// (row index) and at time `j − k` (column index):
/// `exp[−(s_j⁺ − s_j⁻)(η_k s_{j−k}⁺ − η_k* s_{j−k}⁻)]`.
///
/// For `k = 0` only the diagonal is meaningful; it carries `eta_self`.
pub fn influence_tensor(k: usize, eta: &EtaTable) -> Result<Superoperator> {
    let e = eta.lag(k)?;
    let mut out = [[ZERO; 4]; 4];
    for (a, row) in out.iter_mut().enumerate() {
        let (sp, sm) = branch_spins(a);
        for (b, entry) in row.iter_mut().enumerate() {
            let (tp, tm) = branch_spins(b);
            *entry = (-(sp - sm) * (e * tp - e.conj() * tm)).exp();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{eta_coefficients, SpectralDensity, Temperature};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn sigma(j: usize) -> Mat2 {
        let c = Complex64::new;
        match j {
            0 => [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
            1 => [[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
            _ => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
        }
    }

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() < tol))
    }

    #[test]
    fn rotation_maps_coupling_to_sigma_z() {
        for phi in [0.0, 0.3, FRAC_PI_4, FRAC_PI_2] {
            let w = coupling_frame_rotation(phi);
            let (s, c) = phi.sin_cos();
            let coupling: Mat2 = std::array::from_fn(|i| {
                std::array::from_fn(|j| sigma(0)[i][j] * s + sigma(2)[i][j] * c)
            });
            let rotated = matmul2(&adjoint2(&w), &matmul2(&coupling, &w));
            assert!(close(&rotated, &sigma(2), 1e-14), "phi={phi}");
            // lab σ_x becomes cos φ σ_x + sin φ σ_z
            let sx = matmul2(&adjoint2(&w), &matmul2(&sigma(0), &w));
            let expected: Mat2 = std::array::from_fn(|i| {
                std::array::from_fn(|j| sigma(0)[i][j] * c + sigma(2)[i][j] * s)
            });
            assert!(close(&sx, &expected, 1e-14));
        }
    }

    #[test]
    fn lab_polarizations_round_trip() {
        let cfg = SystemConfig {
            phi: 0.7,
            ..SystemConfig::spin_boson(1.0)
        };
        let rho = DensityMatrix::from_polarization(0.1, -0.2, 0.3);
        let back = lab_polarizations(cfg.phi, &lab_to_rotated(&cfg, &rho));
        for (x, y) in back.iter().zip([0.1, -0.2, 0.3]) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn free_propagator_identity_without_hamiltonian() {
        let cfg = SystemConfig::spin_boson(0.0);
        let u = free_propagator(&cfg, 0.3).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((u[a][b] - Complex64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn free_propagator_composes_and_preserves_trace() {
        let cfg = SystemConfig {
            bias: 0.4,
            phi: 0.5,
            ..SystemConfig::spin_boson(1.3)
        };
        let dt = 0.01;
        let step = free_propagator(&cfg, dt).unwrap();
        let full = free_propagator(&cfg, 250.0 * dt).unwrap();
        let rho = lab_to_rotated(&cfg, &DensityMatrix::spin_up());
        let mut v = to_liouville(&rho);
        for _ in 0..250 {
            v = apply(&step, &v);
        }
        let w = apply(&full, &to_liouville(&rho));
        for a in 0..4 {
            assert!((v[a] - w[a]).norm() < 1e-12);
        }
        assert!((v[0] + v[3] - Complex64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn isolated_symmetric_rotation() {
        let cfg = SystemConfig::spin_boson(1.0);
        let step = free_propagator(&cfg, 0.01).unwrap();
        let mut v = to_liouville(&DensityMatrix::spin_up());
        for n in 1..=1000 {
            v = apply(&step, &v);
            let pz = from_liouville(&v).polarization()[2];
            assert!((pz - 0.5 * (0.01 * n as f64).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn commuting_coupling_conserves_coupling_populations() {
        let cfg = SystemConfig::independent_boson(1.0);
        let u = free_propagator(&cfg, 0.2).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    assert!(u[a][b].norm() < 1e-15);
                }
            }
        }
        assert!((u[0][0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((u[3][3] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn influence_tensor_properties() {
        let sd = SpectralDensity::new(0.1, 2.0, 10.0).unwrap();
        let eta = eta_coefficients(&sd, Temperature::Zero, 0.01, 5).unwrap();
        for k in 0..=5 {
            let t = influence_tensor(k, &eta).unwrap();
            for a in [0usize, 3] {
                for b in 0..4 {
                    assert_eq!(t[a][b], Complex64::new(1.0, 0.0));
                }
            }
        }
        let t0 = influence_tensor(0, &eta).unwrap();
        let e0 = eta.eta_self;
        let expected = (-2.0 * (e0 + e0.conj())).exp();
        assert!((t0[1][1] - expected).norm() < 1e-15);
        assert!(influence_tensor(6, &eta).is_err());

        let free = eta_coefficients(&sd.with_alpha(0.0), Temperature::Zero, 0.01, 5).unwrap();
        for k in 0..=5 {
            let t = influence_tensor(k, &free).unwrap();
            assert!(t.iter().flatten().all(|x| *x == Complex64::new(1.0, 0.0)));
        }
    }
}
