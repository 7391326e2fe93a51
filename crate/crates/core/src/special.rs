//! Gamma-function helpers.

use statrs::function::gamma as sg;

/// `Γ(x)`, exact for positive integer arguments (where it is a factorial)
/// and otherwise the Lanczos approximation from `statrs`.
pub fn gamma(x: f64) -> f64 {
    if x.fract() == 0.0 && (1.0..=171.0).contains(&x) {
        return (2..x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    sg::gamma(x)
}

pub fn digamma(x: f64) -> f64 {
    sg::digamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_arguments_are_exact() {
        assert_eq!(gamma(1.0), 1.0);
        assert_eq!(gamma(2.0), 1.0);
        assert_eq!(gamma(3.0), 2.0);
        assert_eq!(gamma(11.0), 3_628_800.0);
    }

    #[test]
    fn non_integer_accuracy() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        for (x, exact) in [
            (0.5, sqrt_pi),
            (1.5, 0.5 * sqrt_pi),
            (2.5, 0.75 * sqrt_pi),
            (4.5, 11.631_728_396_567_448),
            (9.5, 119_292.461_994_609_0),
        ] {
            let rel = (gamma(x) - exact).abs() / exact;
            assert!(rel < 1e-12, "x={x} rel={rel:e}");
        }
    }
}
