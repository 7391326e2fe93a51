//! Bath correlation function of a super-Ohmic bath: closed form at `T = 0`
//! against direct quadrature, plus the discretized influence coefficients.
//!
//! Run: cargo run --release --example bath_correlation -- [s] [beta]

use openqdyn::bath::{
    bath_correlation, bath_correlation_quadrature, bath_correlation_zero_t, eta_coefficients,
    SpectralDensity, Temperature,
};

fn main() -> openqdyn::error::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let s = args.first().copied().unwrap_or(2.0);
    let sd = SpectralDensity::new(0.1, s, 10.0)?;

    println!("T = 0, s = {s}");
    println!("{:>6} {:>26} {:>10}", "t", "C(t)", "|quad-C|");
    for i in 0..=8 {
        let t = 0.05 * i as f64;
        let c = bath_correlation_zero_t(t, &sd);
        let q = bath_correlation_quadrature(t, &sd, Temperature::Zero)?;
        println!(
            "{t:6.2} {:>12.6} {:>+12.6}i {:10.2e}",
            c.re,
            c.im,
            (q - c).norm()
        );
    }

    if let Some(&beta) = args.get(1) {
        let temp = Temperature::Beta(beta);
        println!(
            "beta = {beta}: C(0) = {:.6}",
            bath_correlation(0.0, &sd, temp)?
        );
    }

    let eta = eta_coefficients(&sd, Temperature::Zero, 0.05, 6)?;
    println!("eta_k for dt = 0.05:");
    for k in 0..=6 {
        println!("{k:3} {:.6e}", eta.lag(k)?);
    }
    Ok(())
}
