use openqdyn::analysis::{
    detect_minimum_series, fit_damped_cosine_series, fit_gamma_boundary_data, gamma_boundary_model,
};
use proptest::prelude::*;

fn grid(n: usize, dt: f64) -> Vec<f64> {
    (0..n).map(|i| i as f64 * dt).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn damped_cosine_round_trip(
        amp in 0.1f64..0.5,
        gamma in 0.0f64..0.3,
        omega in 0.8f64..3.0,
        phase in -3.0f64..3.0,
    ) {
        let t = grid(2001, 0.01);
        let y: Vec<f64> = t.iter().map(|&t| amp * (-gamma * t).exp() * (omega * t + phase).cos()).collect();
        let fit = fit_damped_cosine_series(&t, &y, 0.5).unwrap();
        prop_assert!((fit.omega_fit - omega).abs() < 1e-6 * omega, "{fit:?}");
        prop_assert!((fit.gamma_fit - gamma).abs() < 1e-6, "{fit:?}");
        prop_assert!((fit.amplitude - amp).abs() < 1e-6, "{fit:?}");
        prop_assert!(fit.rms_residual < 1e-8);
    }

    #[test]
    fn minimum_detection_is_affine_invariant(
        depth in 1e-5f64..1e-2,
        center in 0.1f64..0.6,
        scale in 0.1f64..10.0,
        offset in -1.0f64..1.0,
    ) {
        // decaying background with a dip of the given depth
        let t = grid(401, 0.0025);
        let y: Vec<f64> = t
            .iter()
            .map(|&t| 0.5 - 0.2 * t - depth * (-((t - center) / 0.02).powi(2)).exp() + depth * t)
            .collect();
        let base = detect_minimum_series(&t, &y, 1.0, 1e-6).unwrap();
        let ys: Vec<f64> = y.iter().map(|v| scale * v + offset).collect();
        let scaled = detect_minimum_series(&t, &ys, 1.0, 1e-6 * scale).unwrap();
        prop_assert_eq!(base.found, scaled.found);
        if base.found {
            prop_assert_eq!(base.t_star, scaled.t_star);
            prop_assert!((scaled.prominence - scale * base.prominence).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn monotone_series_has_no_minimum(rate in 0.01f64..5.0, p_min in 0.0f64..1e-3) {
        let t = grid(301, 0.005);
        let y: Vec<f64> = t.iter().map(|&t| 0.5 * (-rate * t).exp()).collect();
        prop_assert!(!detect_minimum_series(&t, &y, 1.5, p_min).unwrap().found);
    }

    #[test]
    fn gamma_boundary_round_trip(a in 3.0f64..8.0, b in 0.8f64..1.2, c in 0.2f64..0.8) {
        let s: Vec<f64> = (0..12).map(|i| 1.3 + 0.25 * i as f64).collect();
        let alpha: Vec<f64> = s.iter().map(|&s| gamma_boundary_model(s, a, b, c)).collect();
        let fit = fit_gamma_boundary_data(&s, &alpha, None).unwrap();
        prop_assert!((fit.a - a).abs() < 1e-5 * a, "{fit:?}");
        prop_assert!((fit.b - b).abs() < 1e-5, "{fit:?}");
        prop_assert!((fit.c - c).abs() < 1e-5, "{fit:?}");

        let fixed = fit_gamma_boundary_data(&s, &alpha, Some((b, c))).unwrap();
        prop_assert!((fixed.a - a).abs() < 1e-9 * a);
    }
}

#[test]
fn minimum_beyond_window_is_ignored() {
    let t = grid(401, 0.0025);
    let y: Vec<f64> = t.iter().map(|&t| (t - 0.8).powi(2)).collect();
    assert!(detect_minimum_series(&t, &y, 1.0, 1e-4).unwrap().found);
    assert!(!detect_minimum_series(&t, &y, 0.7, 1e-4).unwrap().found);
}
