use num_complex::Complex64;

use super::liouville::{
    apply, free_propagator, from_liouville, influence_tensor, lab_polarizations, lab_to_rotated,
    to_liouville, Superoperator,
};
use super::mps::PathState;
use super::{SystemConfig, TempoParams, Trajectory};
use crate::bath::{eta_coefficients, SpectralDensity};
use crate::error::{Error, Result};

/// Propagate the reduced density matrix on the grid `t_n = n·dt`,
/// `n = 0..=n_steps`, using a symmetric Trotter splitting of the free
/// evolution around each influence step.
///
/// Fails with [`Error::Resource`] (carrying the partial trajectory) when the
/// bond cap is hit, and with [`Error::Numerical`] on non-finite entries.
pub fn propagate(
    cfg: &SystemConfig,
    sd: &SpectralDensity,
    params: &TempoParams,
) -> Result<Trajectory> {
    cfg.validate()?;
    sd.validate()?;
    params.validate()?;
    let dt = params.dt;
    let memory = params.memory();
    let eta = eta_coefficients(sd, cfg.temperature, dt, memory)?;
    if !eta.is_finite() {
        return Err(Error::numerical("non-finite memory coefficients", f64::NAN));
    }
    let influence: Vec<Superoperator> = (0..=memory)
        .map(|k| influence_tensor(k, &eta))
        .collect::<Result<_>>()?;
    let self_weights: [Complex64; 4] = std::array::from_fn(|a| influence[0][a][a]);
    let full = free_propagator(cfg, dt)?;
    let half = free_propagator(cfg, 0.5 * dt)?;

    let mut traj = Trajectory {
        times: Vec::with_capacity(params.n_steps + 1),
        px: Vec::with_capacity(params.n_steps + 1),
        py: Vec::with_capacity(params.n_steps + 1),
        pz: Vec::with_capacity(params.n_steps + 1),
        trace: Vec::with_capacity(params.n_steps + 1),
        truncation_error: Vec::with_capacity(params.n_steps + 1),
        max_bond_dims: Vec::with_capacity(params.n_steps + 1),
        system: *cfg,
        bath: *sd,
        params: *params,
    };
    let [px, py, pz] = cfg.rho0.polarization();
    record(&mut traj, 0.0, [px, py, pz], cfg.rho0.trace().re, 0.0, 1);

    let rho_rot = lab_to_rotated(cfg, &cfg.rho0);
    let v0 = apply(&half, &to_liouville(&rho_rot));
    let first: [Complex64; 4] = std::array::from_fn(|a| v0[a] * self_weights[a]);
    let mut state = PathState::product(&[first]);

    for n in 1..=params.n_steps {
        if n > 1 {
            while state.len() > memory {
                state.sum_out_oldest();
            }
            let len = state.len();
            if let Err(e) = state.grow(
                &influence[..=len],
                &full,
                &self_weights,
                params.svd_cutoff,
                params.max_bond,
            ) {
                return Err(match e {
                    Error::Resource { message, .. } => Error::Resource {
                        message: format!("step {n}: {message}"),
                        partial: Some(Box::new(traj)),
                    },
                    other => other,
                });
            }
        }
        let rho = from_liouville(&apply(&half, &state.open_end()));
        let pol = lab_polarizations(cfg.phi, &rho);
        let trace = rho.trace().re;
        if !pol.iter().all(|x| x.is_finite()) || !trace.is_finite() {
            return Err(Error::numerical(
                format!("non-finite density matrix at step {n}"),
                state.truncation_error(),
            ));
        }
        record(
            &mut traj,
            n as f64 * dt,
            pol,
            trace,
            state.truncation_error(),
            state.max_bond(),
        );
    }
    Ok(traj)
}

fn record(traj: &mut Trajectory, t: f64, pol: [f64; 3], trace: f64, err: f64, bond: usize) {
    traj.times.push(t);
    traj.px.push(pol[0]);
    traj.py.push(pol[1]);
    traj.pz.push(pol[2]);
    traj.trace.push(trace);
    traj.truncation_error.push(err);
    traj.max_bond_dims.push(bond);
}
