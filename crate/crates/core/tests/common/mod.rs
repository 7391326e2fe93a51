#![allow(dead_code)]

use num_complex::Complex64;
use openqdyn::bath::{eta_coefficients, SpectralDensity};
use openqdyn::tempo::{
    free_propagator, influence_tensor, lab_polarizations, DensityMatrix, Superoperator,
    SystemConfig,
};

/// Rotated-frame density matrix of a lab-frame state.
pub fn to_rotated(phi: f64, rho: &DensityMatrix) -> DensityMatrix {
    let (s, c) = (0.5 * phi).sin_cos();
    let w = [[c, -s], [s, c]];
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    // W† ρ W with real W
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[i][j] += w[k][i] * rho.0[k][l] * w[l][j];
                }
            }
        }
    }
    DensityMatrix(out)
}

fn apply(op: &Superoperator, v: &[Complex64; 4]) -> [Complex64; 4] {
    std::array::from_fn(|a| (0..4).map(|b| op[a][b] * v[b]).sum())
}

/// Explicit sum over all `4^n` Liouville paths for `ρ(t_n)`, `n ≥ 1`, with
/// the same Trotter splitting and full memory. Returns lab-frame
/// polarizations for `n = 1..=n_max`.
pub fn dense_path_sum(
    cfg: &SystemConfig,
    sd: &SpectralDensity,
    dt: f64,
    n_max: usize,
) -> Vec<[f64; 3]> {
    let eta = eta_coefficients(sd, cfg.temperature, dt, n_max).unwrap();
    let infl: Vec<Superoperator> = (0..=n_max)
        .map(|k| influence_tensor(k, &eta).unwrap())
        .collect();
    let full = free_propagator(cfg, dt).unwrap();
    let half = free_propagator(cfg, 0.5 * dt).unwrap();
    let r = to_rotated(cfg.phi, &cfg.rho0);
    let v0 = apply(&half, &[r.0[0][0], r.0[0][1], r.0[1][0], r.0[1][1]]);

    (1..=n_max)
        .map(|n| {
            // acc[b] = Σ over paths with last variable b
            let mut acc = [Complex64::new(0.0, 0.0); 4];
            let mut path = vec![0usize; n];
            fn rec(
                j: usize,
                n: usize,
                weight: Complex64,
                path: &mut [usize],
                infl: &[Superoperator],
                full: &Superoperator,
                v0: &[Complex64; 4],
                acc: &mut [Complex64; 4],
            ) {
                for a in 0..4 {
                    let mut w = weight * infl[0][a][a];
                    if j == 0 {
                        w *= v0[a];
                    } else {
                        w *= full[a][path[j - 1]];
                        for i in 0..j {
                            w *= infl[j - i][a][path[i]];
                        }
                    }
                    if w == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    path[j] = a;
                    if j + 1 == n {
                        acc[a] += w;
                    } else {
                        rec(j + 1, n, w, path, infl, full, v0, acc);
                    }
                }
            }
            rec(
                0,
                n,
                Complex64::new(1.0, 0.0),
                &mut path,
                &infl,
                &full,
                &v0,
                &mut acc,
            );
            let v = apply(&half, &acc);
            lab_polarizations(cfg.phi, &DensityMatrix([[v[0], v[1]], [v[2], v[3]]]))
        })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
