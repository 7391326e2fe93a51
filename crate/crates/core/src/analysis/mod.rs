//! Post-processing of trajectories: damped-cosine fits, detection of the
//! pseudo-coherent minimum, the `α_B(s)` bisection scan and the
//! Gamma-function fit of the resulting boundary.

mod fit;
mod gamma_fit;
mod lm;
mod minimum;
mod scan;

pub use fit::{
    fit_damped_cosine, fit_damped_cosine_series, fit_relaxing_oscillation_series, FitResult,
    RelaxingFit,
};
pub use gamma_fit::{fit_gamma_boundary, fit_gamma_boundary_data, gamma_boundary_model, GammaFit};
pub use minimum::{
    detect_minimum, detect_minimum_series, MinimumReport, DEFAULT_P_MIN,
    MIN_SAMPLES_PER_CUTOFF_TIME,
};
pub use scan::{
    default_t_max, half_coupling_to_full, probe_minimum, scan_alpha_b, verify_bracket,
    PhaseBoundaryPoint, Probe, ScanSettings,
};
