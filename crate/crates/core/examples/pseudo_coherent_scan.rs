//! Bisection for the coupling `α_B` where a pseudo-coherent minimum first
//! appears in `P_z(t)` at short times.
//!
//! Run: cargo run --release --example pseudo_coherent_scan -- [s] [omega_c] [p_min]

use openqdyn::analysis::{default_t_max, scan_alpha_b, ScanSettings};
use openqdyn::bath::SpectralDensity;
use openqdyn::ibm::overdamping_boundary;
use openqdyn::tempo::{SystemConfig, TempoParams};

fn main() -> openqdyn::error::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let s = args.first().copied().unwrap_or(2.0);
    let omega_c = args.get(1).copied().unwrap_or(10.0);
    let p_min = args.get(2).copied().unwrap_or(1e-6);

    let bath = SpectralDensity::new(0.0, s, omega_c)?;
    let params = TempoParams::new(0.05 / omega_c, 1).with_cutoff(1e-9);
    let settings = ScanSettings {
        tolerance: 0.02,
        ..ScanSettings::new(0.6, 1.0, default_t_max(s, 1.0)).with_p_min(p_min)
    };
    let point = scan_alpha_b(s, &bath, &SystemConfig::spin_boson(1.0), &params, &settings)?;

    println!(
        "{:>8} {:>6} {:>10} {:>12} {:>6}",
        "alpha", "found", "t*", "prominence", "bond"
    );
    for p in &point.probes {
        println!(
            "{:8.4} {:>6} {:10.4} {:12.3e} {:6}",
            p.alpha, p.minimum.found, p.minimum.t_star, p.minimum.prominence, p.max_bond
        );
    }
    println!(
        "s = {s}: alpha_B = {:.4} in [{:.4}, {:.4}] (p_min {p_min:e}); alpha_o = {:.4}",
        point.alpha_b,
        point.alpha_lo,
        point.alpha_hi,
        overdamping_boundary(s)?
    );
    Ok(())
}
