//! Fit `α_B(s) = A / (8 Γ(Bs − C))` to boundary points, either from a
//! `phase_boundary.csv` written by the CLI or from a built-in synthetic set.
//!
//! Run: cargo run --release --example gamma_boundary_fit -- [phase_boundary.csv]

use openqdyn::analysis::{fit_gamma_boundary_data, gamma_boundary_model};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (s, alpha): (Vec<f64>, Vec<f64>) = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?
            .lines()
            .skip(1)
            .filter_map(|line| {
                let cols: Vec<f64> = line.split(',').filter_map(|c| c.parse().ok()).collect();
                (cols.len() >= 2 && cols[1].is_finite()).then(|| (cols[0], cols[1]))
            })
            .unzip(),
        None => {
            let s: Vec<f64> = (0..10).map(|i| 1.5 + 0.35 * i as f64).collect();
            let alpha = s
                .iter()
                .map(|&s| gamma_boundary_model(s, 5.487, 1.026, 0.5342))
                .collect();
            (s, alpha)
        }
    };

    let fixed = fit_gamma_boundary_data(&s, &alpha, Some((1.0, 0.5)))?;
    println!(
        "B = 1, C = 1/2:  A = {:.4} +- {:.4}",
        fixed.a,
        fixed.covariance[0][0].sqrt()
    );
    if s.len() >= 3 {
        let free = fit_gamma_boundary_data(&s, &alpha, None)?;
        println!(
            "free fit:        A = {:.4}, B = {:.4}, C = {:.4}, residual {:.2e}",
            free.a, free.b, free.c, free.residual
        );
        println!("{:>6} {:>10} {:>10}", "s", "alpha_B", "model");
        for (si, ai) in s.iter().zip(&alpha) {
            println!("{si:6.3} {ai:10.5} {:10.5}", free.evaluate(*si));
        }
    }
    Ok(())
}
