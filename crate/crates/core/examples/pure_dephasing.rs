//! Independent-boson model: TEMPO in the rotated frame against the exact
//! `½cos(Δt) e^{−Γ(t)}`, with the envelope sampled at `t = nπ/Δ`.
//!
//! Run: cargo run --release --example pure_dephasing -- [alpha] [s] [beta]

use openqdyn::bath::{SpectralDensity, Temperature};
use openqdyn::ibm::{alpha_tilde, decay_function, ibm_polarization};
use openqdyn::tempo::{propagate, SystemConfig, TempoParams};

fn main() -> openqdyn::error::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let alpha = args.first().copied().unwrap_or(0.2);
    let s = args.get(1).copied().unwrap_or(2.0);
    let temperature = args
        .get(2)
        .map_or(Temperature::Zero, |&b| Temperature::Beta(b));

    let sd = SpectralDensity::new(alpha, s, 10.0)?;
    let cfg = SystemConfig {
        temperature,
        ..SystemConfig::independent_boson(1.0)
    };
    let dt = std::f64::consts::PI / 300.0;
    let traj = propagate(&cfg, &sd, &TempoParams::new(dt, 900))?;

    println!(
        "alpha = {alpha}, s = {s}, {temperature:?}, plateau e^-a~ = {:.5}",
        (-alpha_tilde(alpha, s)?).exp()
    );
    println!(
        "{:>8} {:>12} {:>12} {:>12}",
        "t", "TEMPO", "exact", "|P_z|/(1/2)"
    );
    for n in 1..=3 {
        let i = 300 * n;
        let exact = ibm_polarization(traj.times[i], 1.0, &sd, temperature)?;
        println!(
            "{:8.4} {:12.8} {:12.8} {:12.8}",
            traj.times[i],
            traj.pz[i],
            exact,
            2.0 * traj.pz[i].abs()
        );
    }
    let mut err: f64 = 0.0;
    for (t, p) in traj.times.iter().zip(&traj.pz) {
        err = err.max((p - ibm_polarization(*t, 1.0, &sd, temperature)?).abs());
    }
    println!(
        "max |TEMPO - exact| = {err:.2e}; Gamma(3pi) = {:.5}",
        decay_function(traj.times[traj.len() - 1], &sd, temperature)?
    );
    Ok(())
}
