//! The overdamping boundary `α_o(s) = 1/(8Γ(s−1))` and its maximum.
//!
//! Run: cargo run --release --example overdamping_boundary

use openqdyn::ibm::{alpha_tilde, overdamping_boundary, overdamping_peak};

fn main() -> openqdyn::error::Result<()> {
    println!("{:>6} {:>10}", "s", "alpha_o");
    for i in 0..=16 {
        let s = 1.2 + 0.25 * i as f64;
        println!("{s:6.2} {:10.5}", overdamping_boundary(s)?);
    }
    let (s_peak, a_peak) = overdamping_peak();
    println!("maximum alpha_o = {a_peak:.5} at s = {s_peak:.5}");
    // by construction a~(alpha_o(s), s) = 1
    println!(
        "a~ at the boundary for s = 3: {:.12}",
        alpha_tilde(overdamping_boundary(3.0)?, 3.0)?
    );
    Ok(())
}
