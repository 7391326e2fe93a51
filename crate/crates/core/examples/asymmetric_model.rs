//! Spin-boson model with a rotated coupling `(sin φ σ_x + cos φ σ_z) X`,
//! observed in the basis where the bath couples through `σ_z`.
//!
//! `P_x` first loses coherence on the bath time scale `1/ω_c`, then
//! oscillates about a relaxing mean.
//!
//! Run: cargo run --release --example asymmetric_model -- [alpha] [t_max]

use openqdyn::analysis::fit_relaxing_oscillation_series;
use openqdyn::bath::SpectralDensity;
use openqdyn::ibm::alpha_tilde;
use openqdyn::tempo::{propagate, DensityMatrix, SystemConfig, TempoParams};

fn main() -> openqdyn::error::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let alpha = args.first().copied().unwrap_or(0.2);
    let t_max = args.get(1).copied().unwrap_or(30.0);

    // φ = π/4 with Δ = 1 folded into the rotated Hamiltonian.
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cfg = SystemConfig {
        bias: h,
        rho0: DensityMatrix::from_polarization(0.5, 0.0, 0.0),
        ..SystemConfig::spin_boson(h)
    };
    let sd = SpectralDensity::new(alpha, 2.0, 10.0)?;

    let short = propagate(&cfg, &sd, &TempoParams::until(0.5, 0.005).with_cutoff(1e-8))?;
    println!(
        "short times, e^-a~ = {:.4}",
        (-alpha_tilde(alpha, 2.0)?).exp()
    );
    println!("{:>6} {:>10} {:>10}", "t", "P_x", "P_z");
    for i in (0..short.len()).step_by(10) {
        println!(
            "{:6.3} {:10.6} {:10.6}",
            short.times[i], short.px[i], short.pz[i]
        );
    }

    let long = propagate(
        &cfg,
        &sd,
        &TempoParams::until(t_max, 0.05)
            .with_memory(100)
            .with_cutoff(1e-7),
    )?;
    let fit = fit_relaxing_oscillation_series(&long.times, &long.px, 1.0)?;
    println!(
        "P_x on [1, {t_max}]: {:.4} + {:.4} e^(-{:.4} t) + {:.4} e^(-{:.4e} t) cos({:.4} t + {:.3})",
        fit.offset,
        fit.drift_amplitude,
        fit.drift_rate,
        fit.oscillation.amplitude,
        fit.oscillation.gamma_fit,
        fit.oscillation.omega_fit,
        fit.oscillation.phase
    );
    println!("free oscillation amplitude of P_x: 0.25");
    Ok(())
}
