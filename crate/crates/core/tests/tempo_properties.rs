mod common;

use common::{dense_path_sum, max_abs_diff};
use openqdyn::bath::{SpectralDensity, Temperature};
use openqdyn::error::Error;
use openqdyn::ibm::{decay_function, ibm_polarization};
use openqdyn::tempo::{propagate, DensityMatrix, SystemConfig, TempoParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_case(rng: &mut ChaCha8Rng) -> (SystemConfig, SpectralDensity, f64) {
    let s = [1.5, 2.0, 3.0][rng.random_range(0..3)];
    let sd =
        SpectralDensity::new(rng.random_range(0.05..0.5), s, rng.random_range(2.0..10.0)).unwrap();
    // random pure or mixed initial state inside the Bloch ball
    let r = rng.random_range(0.0..0.5);
    let th: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let ph: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let cfg = SystemConfig {
        delta: rng.random_range(0.5..1.5),
        phi: rng.random_range(0.0..std::f64::consts::FRAC_PI_2),
        bias: rng.random_range(-0.5..0.5),
        rho0: DensityMatrix::from_polarization(
            r * th.sin() * ph.cos(),
            r * th.sin() * ph.sin(),
            r * th.cos(),
        ),
        temperature: if rng.random_bool(0.5) {
            Temperature::Zero
        } else {
            Temperature::Beta(rng.random_range(1.0..20.0))
        },
    };
    (cfg, sd, rng.random_range(0.05..0.2))
}

#[test]
fn contraction_matches_explicit_path_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..8 {
        let (cfg, sd, dt) = random_case(&mut rng);
        let n = if trial == 0 { 9 } else { 6 };
        let traj = propagate(&cfg, &sd, &TempoParams::new(dt, n).with_cutoff(1e-15)).unwrap();
        let dense = dense_path_sum(&cfg, &sd, dt, n);
        for (k, p) in dense.iter().enumerate() {
            let got = [traj.px[k + 1], traj.py[k + 1], traj.pz[k + 1]];
            let d = max_abs_diff(&got, p);
            assert!(
                d < 1e-10,
                "trial {trial} step {}: {got:?} vs {p:?} ({d:e})",
                k + 1
            );
        }
    }
}

#[test]
fn memory_cap_at_run_length_is_full_memory() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (cfg, sd, dt) = random_case(&mut rng);
    let full = propagate(&cfg, &sd, &TempoParams::new(dt, 12)).unwrap();
    let capped = propagate(&cfg, &sd, &TempoParams::new(dt, 12).with_memory(12)).unwrap();
    assert_eq!(full.pz, capped.pz);
    assert_eq!(full.px, capped.px);
}

#[test]
fn physical_invariants_at_strong_coupling() {
    let sd = SpectralDensity::new(0.5, 2.0, 10.0).unwrap();
    let cfg = SystemConfig {
        bias: 0.3,
        phi: 0.4,
        ..SystemConfig::spin_boson(1.0)
    };
    let traj = propagate(&cfg, &sd, &TempoParams::until(1.0, 0.01).with_cutoff(1e-9)).unwrap();
    for i in 0..traj.len() {
        assert!(
            (traj.trace[i] - 1.0).abs() < 1e-6,
            "trace {} at {}",
            traj.trace[i],
            traj.times[i]
        );
        assert!(
            traj.bloch_norm_sq(i) <= 0.25 + 1e-6,
            "outside Bloch ball at {}",
            traj.times[i]
        );
        assert!(traj.truncation_error[i] >= 0.0);
    }
    assert!(traj.truncation_error.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn uncoupled_system_oscillates_freely() {
    let sd = SpectralDensity::new(0.0, 2.0, 10.0).unwrap();
    let traj = propagate(
        &SystemConfig::spin_boson(1.0),
        &sd,
        &TempoParams::until(5.0, 0.05),
    )
    .unwrap();
    for i in 0..traj.len() {
        let t = traj.times[i];
        assert!((traj.pz[i] - 0.5 * t.cos()).abs() < 1e-10);
        assert!((traj.py[i] + 0.5 * t.sin()).abs() < 1e-10);
        assert!(traj.px[i].abs() < 1e-10);
    }
}

#[test]
fn pure_dephasing_matches_closed_form_components() {
    let sd = SpectralDensity::new(0.2, 2.0, 10.0).unwrap();
    for temp in [Temperature::Zero, Temperature::Beta(5.0)] {
        let cfg = SystemConfig {
            temperature: temp,
            ..SystemConfig::independent_boson(1.0)
        };
        let traj = propagate(&cfg, &sd, &TempoParams::until(2.0, 0.02)).unwrap();
        for i in 0..traj.len() {
            let t = traj.times[i];
            let env = 0.5 * (-decay_function(t, &sd, temp).unwrap()).exp();
            assert!((traj.pz[i] - ibm_polarization(t, 1.0, &sd, temp).unwrap()).abs() < 1e-8);
            assert!((traj.py[i] + t.sin() * env).abs() < 1e-8, "P_y at {t}");
            assert!(traj.px[i].abs() < 1e-8);
        }
    }
}

#[test]
fn tighter_cutoff_converges() {
    let sd = SpectralDensity::new(0.4, 2.0, 10.0).unwrap();
    let cfg = SystemConfig::spin_boson(1.0);
    let base = TempoParams::until(1.0, 0.02);
    let reference = propagate(&cfg, &sd, &base.with_cutoff(1e-12)).unwrap();
    let errs: Vec<f64> = [1e-4, 1e-6, 1e-8]
        .iter()
        .map(|&c| {
            max_abs_diff(
                &propagate(&cfg, &sd, &base.with_cutoff(c)).unwrap().pz,
                &reference.pz,
            )
        })
        .collect();
    assert!(errs[2] < errs[0], "{errs:?}");
    assert!(errs[2] < 1e-6, "{errs:?}");
}

#[test]
fn bitwise_deterministic() {
    let sd = SpectralDensity::new(0.3, 2.0, 10.0).unwrap();
    let p = TempoParams::until(0.5, 0.01);
    let a = propagate(&SystemConfig::spin_boson(1.0), &sd, &p).unwrap();
    let b = propagate(&SystemConfig::spin_boson(1.0), &sd, &p).unwrap();
    assert_eq!(a.pz, b.pz);
    assert_eq!(a.truncation_error, b.truncation_error);
}

#[test]
fn bond_cap_returns_partial_trajectory() {
    let sd = SpectralDensity::new(0.8, 2.0, 10.0).unwrap();
    let p = TempoParams::until(1.0, 0.01).with_max_bond(4);
    match propagate(&SystemConfig::spin_boson(1.0), &sd, &p) {
        Err(Error::Resource {
            partial: Some(t), ..
        }) => {
            assert!(t.len() >= 2 && t.len() < p.n_steps + 1);
            assert_eq!(t.times[0], 0.0);
        }
        other => panic!("expected a resource error, got {other:?}"),
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let sd = SpectralDensity::new(0.1, 2.0, 10.0).unwrap();
    let cfg = SystemConfig::spin_boson(1.0);
    assert!(propagate(&cfg, &sd, &TempoParams::new(-0.1, 10)).is_err());
    assert!(propagate(&cfg, &sd, &TempoParams::new(0.1, 10).with_cutoff(2.0)).is_err());
    let bad = SystemConfig {
        rho0: DensityMatrix::from_polarization(0.5, 0.0, 0.5),
        ..cfg
    };
    assert!(propagate(&bad, &sd, &TempoParams::new(0.1, 10)).is_err());
}
