//! Uncoupled two-level system propagated with TEMPO, compared to `½cos Δt`.
//!
//! Run: cargo run --release --example free_evolution

use openqdyn::bath::SpectralDensity;
use openqdyn::tempo::{propagate, SystemConfig, TempoParams};

fn main() -> openqdyn::error::Result<()> {
    let sd = SpectralDensity::new(0.0, 2.0, 10.0)?;
    let traj = propagate(
        &SystemConfig::spin_boson(1.0),
        &sd,
        &TempoParams::until(10.0, 0.01),
    )?;

    println!("{:>6} {:>12} {:>12}", "t", "P_z", "cos(t)/2");
    for i in (0..traj.len()).step_by(100) {
        println!(
            "{:6.2} {:12.8} {:12.8}",
            traj.times[i],
            traj.pz[i],
            0.5 * traj.times[i].cos()
        );
    }
    let err = traj
        .times
        .iter()
        .zip(&traj.pz)
        .map(|(t, p)| (p - 0.5 * t.cos()).abs())
        .fold(0.0, f64::max);
    println!(
        "max deviation {err:.2e}, max bond {}",
        traj.max_bond_dims.iter().max().unwrap()
    );
    Ok(())
}
