//! Symmetric spin-boson model at weak coupling: fit `A e^{−γt} cos(Ωt + φ)`
//! to `P_z(t)` and compare with the weak-coupling estimates.
//!
//! A memory cutoff of `5Δ^{-1}` keeps long runs affordable.
//!
//! Run: cargo run --release --example weak_coupling_fit -- [alpha] [omega_c] [t_max]

use std::time::Instant;

use openqdyn::analysis::fit_damped_cosine;
use openqdyn::bath::SpectralDensity;
use openqdyn::ibm::{alpha_tilde, WeakCouplingPrediction};
use openqdyn::tempo::{propagate, SystemConfig, TempoParams};

fn main() -> openqdyn::error::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let alpha = args.first().copied().unwrap_or(0.1);
    let omega_c = args.get(1).copied().unwrap_or(10.0);
    let t_max = args.get(2).copied().unwrap_or(30.0);

    let sd = SpectralDensity::new(alpha, 2.0, omega_c)?;
    let dt = 0.05;
    let params = TempoParams::until(t_max, dt)
        .with_memory((5.0 / dt) as usize)
        .with_cutoff(1e-7);
    let start = Instant::now();
    let traj = propagate(&SystemConfig::spin_boson(1.0), &sd, &params)?;
    let fit = fit_damped_cosine(&traj, 0.5)?;
    let pred = WeakCouplingPrediction::new(&sd, 1.0)?;

    println!(
        "alpha = {alpha}, s = 2, omega_c = {omega_c}, t <= {t_max} ({:.0} s)",
        start.elapsed().as_secs_f64()
    );
    println!(
        "fit window {:?}, rms residual {:.2e}",
        fit.t_window, fit.rms_residual
    );
    println!(
        "Omega = {:.5}   Delta e^-a~ = {:.5}   Delta e^-a~/2 = {:.5}",
        fit.omega_fit,
        pred.delta_eff,
        (-0.5 * alpha_tilde(alpha, 2.0)?).exp()
    );
    println!(
        "gamma = {:.4e}  (pi/2) alpha Delta_eff^2 / omega_c = {:.4e}",
        fit.gamma_fit, pred.gamma_eff
    );
    println!(
        "max bond {}, truncation error {:.2e}",
        traj.max_bond_dims.iter().max().unwrap(),
        traj.truncation_error.last().unwrap()
    );
    Ok(())
}
