use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Mode, RunConfig};
use super::output::{
    ensure_dir, fmt_sig, read_trajectory_csv, run_id, trajectory_csv, write_meta, Diagnostics,
    PHASE_BOUNDARY_HEADER,
};
use crate::analysis::{gamma_boundary_model, scan_alpha_b, PhaseBoundaryPoint};
use crate::error::{Error, Result};
use crate::ibm::{decay_function, overdamping_boundary, WeakCouplingPrediction};
use crate::tempo::{propagate, TempoParams, Trajectory};

/// A finished single-trajectory run.
#[derive(Debug, Clone)]
pub struct RunArtifact {
    pub dir: PathBuf,
    pub trajectory: Trajectory,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Propagate one configuration and write `trajectory.csv` and `meta.json`
/// under `<out>/<run-id>/`. On a bond-cap failure the partial trajectory is
/// still written before the error is returned.
pub fn run_single(config: &RunConfig, out: &Path) -> Result<RunArtifact> {
    config.validate()?;
    let system = config.system_config()?;
    let sd = config.spectral_density()?;
    let params = config.tempo_params()?;
    let dir = out.join(run_id(config));
    ensure_dir(&dir)?;
    match propagate(&system, &sd, &params) {
        Ok(traj) => {
            fs::write(dir.join("trajectory.csv"), trajectory_csv(&traj))?;
            write_meta(
                &dir,
                config,
                Some(Diagnostics::of(&traj, "complete")),
                Some(&traj.max_bond_dims),
            )?;
            Ok(RunArtifact {
                dir,
                trajectory: traj,
            })
        }
        Err(Error::Resource { message, partial }) => {
            if let Some(traj) = &partial {
                fs::write(dir.join("trajectory.csv"), trajectory_csv(traj))?;
                write_meta(
                    &dir,
                    config,
                    Some(Diagnostics::of(traj, "partial")),
                    Some(&traj.max_bond_dims),
                )?;
            }
            Err(Error::Resource { message, partial })
        }
        Err(e) => Err(e),
    }
}

/// Closed-form pure-dephasing trajectory on the configured time grid.
pub fn run_ibm(config: &RunConfig, out: &Path) -> Result<RunArtifact> {
    config.validate()?;
    let mut system = config.system_config()?;
    system.phi = std::f64::consts::FRAC_PI_2;
    let sd = config.spectral_density()?;
    let params = config.tempo_params()?;
    let delta = system.delta;
    let n = params.n_steps + 1;
    let mut traj = Trajectory {
        times: Vec::with_capacity(n),
        px: vec![0.0; n],
        py: Vec::with_capacity(n),
        pz: Vec::with_capacity(n),
        trace: vec![1.0; n],
        truncation_error: vec![0.0; n],
        max_bond_dims: vec![1; n],
        system,
        bath: sd,
        params,
    };
    for i in 0..n {
        let t = i as f64 * params.dt;
        let envelope = 0.5 * (-decay_function(t, &sd, system.temperature)?).exp();
        let (sin, cos) = (delta * t).sin_cos();
        traj.times.push(t);
        traj.py.push(-sin * envelope);
        traj.pz.push(cos * envelope);
    }
    let dir = out.join(run_id(config));
    ensure_dir(&dir)?;
    fs::write(dir.join("trajectory.csv"), trajectory_csv(&traj))?;
    write_meta(&dir, config, Some(Diagnostics::of(&traj, "complete")), None)?;
    Ok(RunArtifact {
        dir,
        trajectory: traj,
    })
}

/// One run per entry of `scan.alpha_grid`, on up to `workers` threads.
/// Results come back in grid order.
pub fn run_alpha_sweep(config: &RunConfig, out: &Path, workers: usize) -> Result<Vec<RunArtifact>> {
    config.validate()?;
    let configs: Vec<RunConfig> = config
        .scan
        .alpha_grid
        .iter()
        .map(|&alpha| {
            let mut c = config.clone();
            c.mode = Mode::Single;
            c.bath.alpha = alpha;
            c.output.run_id = None;
            c
        })
        .collect();
    let results: Vec<Result<RunArtifact>> =
        pool(workers)?.install(|| configs.par_iter().map(|c| run_single(c, out)).collect());
    results.into_iter().collect()
}

/// One row of the phase-boundary table; failures are kept in-row.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryRow {
    pub s: f64,
    pub alpha_o: f64,
    pub point: Option<PhaseBoundaryPoint>,
    pub error: Option<String>,
    #[serde(skip)]
    pub exit_code: i32,
}

/// Boundary scan over `scan.s_grid`; writes `<out>/phase_boundary.csv` and a
/// JSON sidecar with all probes. Rows are sorted by `s` whatever the worker
/// count. Fails only if every point fails.
pub fn run_boundary_scan(
    config: &RunConfig,
    out: &Path,
    workers: usize,
) -> Result<Vec<BoundaryRow>> {
    config.validate()?;
    let system = config.system_config()?;
    let sd = config.spectral_density()?;
    // The step count is set per probe from the scan window.
    let params = TempoParams {
        dt: config.tempo.dt,
        n_steps: 1,
        svd_cutoff: config.tempo.svd_cutoff,
        max_bond: config.tempo.max_bond,
        memory_length: config.tempo.memory_length,
    };
    let mut grid = config.scan.s_grid.clone();
    grid.sort_by(f64::total_cmp);
    let rows: Vec<BoundaryRow> = pool(workers)?.install(|| {
        grid.par_iter()
            .map(|&s| {
                let alpha_o = overdamping_boundary(s).unwrap_or(f64::NAN);
                match scan_alpha_b(s, &sd, &system, &params, &config.scan_settings(s)) {
                    Ok(p) => BoundaryRow {
                        s,
                        alpha_o,
                        point: Some(p),
                        error: None,
                        exit_code: 0,
                    },
                    Err(e) => BoundaryRow {
                        s,
                        alpha_o,
                        point: None,
                        error: Some(format!("{}: {e}", e.kind())),
                        exit_code: super::exit_code(&e),
                    },
                }
            })
            .collect()
    });

    ensure_dir(out)?;
    let mut csv = String::from(PHASE_BOUNDARY_HEADER);
    csv.push('\n');
    for row in &rows {
        let settings = config.scan_settings(row.s);
        let (b, lo, hi) = match &row.point {
            Some(p) => (p.alpha_b, p.alpha_lo, p.alpha_hi),
            None => (f64::NAN, f64::NAN, f64::NAN),
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            fmt_sig(row.s),
            fmt_sig(b),
            fmt_sig(lo),
            fmt_sig(hi),
            fmt_sig(settings.t_max),
            fmt_sig(settings.p_min),
            fmt_sig(row.alpha_o)
        );
    }
    fs::write(out.join("phase_boundary.csv"), csv)?;
    #[derive(Serialize)]
    struct Sidecar<'a> {
        config: &'a RunConfig,
        version: &'static str,
        rows: &'a [BoundaryRow],
    }
    let text = serde_json::to_string_pretty(&Sidecar {
        config,
        version: super::output::VERSION,
        rows: &rows,
    })
    .map_err(|e| Error::Config(e.to_string()))?;
    fs::write(out.join("phase_boundary.json"), text + "\n")?;

    if rows.iter().all(|r| r.point.is_none()) {
        let first = rows
            .first()
            .and_then(|r| r.error.clone())
            .unwrap_or_default();
        return Err(Error::Scan(format!(
            "every boundary point failed; first: {first}"
        )));
    }
    Ok(rows)
}

pub const FIGURES: [&str; 8] = [
    "fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig3a", "fig3b",
];

/// `s ∈ [1.1, 5]` in steps of 0.05.
pub fn exponent_grid() -> Vec<f64> {
    (0..=78).map(|i| 1.1 + 0.05 * i as f64).collect()
}

fn artifact_table(path: &Path) -> Result<(String, PathBuf)> {
    let file = if path.is_dir() {
        path.join("trajectory.csv")
    } else {
        path.to_path_buf()
    };
    if !file.is_file() {
        return Err(Error::Config(format!(
            "missing artifact {}",
            file.display()
        )));
    }
    let label = file
        .parent()
        .and_then(|p| p.file_name())
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    Ok((label, file))
}

fn write_curve(path: &Path, header: &str, rows: impl Iterator<Item = Vec<f64>>) -> Result<PathBuf> {
    let mut text = format!("# {header}\n");
    for row in rows {
        let cols: Vec<String> = row.into_iter().map(fmt_sig).collect();
        text += &cols.join(" ");
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(path.to_path_buf())
}

/// Write plot-ready curve files for `figure` into `out`, one per curve, and
/// return their paths in a deterministic order.
///
/// Trajectory figures (`fig1*`, `fig3*`) take run directories or
/// `trajectory.csv` files; `fig2a` optionally takes `phase_boundary.csv`
/// files; `fig2b` is analytic.
pub fn emit_plot_data(figure: &str, artifacts: &[PathBuf], out: &Path) -> Result<Vec<PathBuf>> {
    if !FIGURES.contains(&figure) {
        return Err(Error::Config(format!(
            "unknown figure id {figure:?}; known: {}",
            FIGURES.join(", ")
        )));
    }
    ensure_dir(out)?;
    let mut written = Vec::new();
    match figure {
        "fig2b" => {
            let rows = exponent_grid()
                .into_iter()
                .map(|s| vec![s, overdamping_boundary(s).unwrap_or(f64::NAN)]);
            written.push(write_curve(
                &out.join("fig2b_alpha_o.dat"),
                "s [1]  alpha_o [1]",
                rows,
            )?);
        }
        "fig2a" => {
            for (i, path) in artifacts.iter().enumerate() {
                let file = if path.is_dir() {
                    path.join("phase_boundary.csv")
                } else {
                    path.clone()
                };
                let text = fs::read_to_string(&file).map_err(|e| {
                    Error::Config(format!("missing artifact {}: {e}", file.display()))
                })?;
                let mut rows = Vec::new();
                for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
                    let cols: Vec<f64> = line
                        .split(',')
                        .map(|c| c.trim().parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| Error::Config(format!("{}: {e}", file.display())))?;
                    if cols.len() != 7 {
                        return Err(Error::Config(format!(
                            "{}: expected 7 columns",
                            file.display()
                        )));
                    }
                    rows.push(vec![cols[0], cols[1], cols[2], cols[3]]);
                }
                let name = format!("fig2a_alpha_B_{i}.dat");
                written.push(write_curve(
                    &out.join(name),
                    "s [1]  alpha_B [1]  alpha_lo [1]  alpha_hi [1]",
                    rows.into_iter(),
                )?);
            }
            let grid = exponent_grid();
            written.push(write_curve(
                &out.join("fig2a_fit_fixed_bc.dat"),
                "s [1]  A/(8 Gamma(s - 1/2)) with A = 5.42",
                grid.iter()
                    .map(|&s| vec![s, gamma_boundary_model(s, 5.42, 1.0, 0.5)]),
            )?);
            written.push(write_curve(
                &out.join("fig2a_fit_free.dat"),
                "s [1]  A/(8 Gamma(B s - C)) with A = 5.487, B = 1.026, C = 0.5342",
                grid.iter()
                    .map(|&s| vec![s, gamma_boundary_model(s, 5.487, 1.026, 0.5342)]),
            )?);
        }
        _ => {
            if artifacts.is_empty() {
                return Err(Error::Config(format!(
                    "{figure} needs at least one trajectory artifact"
                )));
            }
            for path in artifacts {
                let (label, file) = artifact_table(path)?;
                let table = read_trajectory_csv(&file)?;
                let idx = 0..table.t.len();
                let curve = match figure {
                    "fig3a" => write_curve(
                        &out.join(format!("{figure}_{label}.dat")),
                        "t [1/Delta]  Px [1]  Pz [1]",
                        idx.filter(|&i| table.t[i] <= 0.5 + 1e-12)
                            .map(|i| vec![table.t[i], table.px[i], table.pz[i]]),
                    )?,
                    "fig3b" => write_curve(
                        &out.join(format!("{figure}_{label}.dat")),
                        "t [1/Delta]  Px [1]  Pz [1]",
                        idx.map(|i| vec![table.t[i], table.px[i], table.pz[i]]),
                    )?,
                    _ => write_curve(
                        &out.join(format!("{figure}_{label}.dat")),
                        "t [1/Delta]  Pz [1]",
                        idx.map(|i| vec![table.t[i], table.pz[i]]),
                    )?,
                };
                written.push(curve);
                if figure == "fig1d" {
                    if let Some(c) = weak_coupling_curve(&file, &table.t, out, &label)? {
                        written.push(c);
                    }
                }
            }
        }
    }
    Ok(written)
}

/// `½ e^{−γ_eff t} cos(Δ_eff t)` for the run described by the sidecar next
/// to `table`, if the sidecar exists and the exponent allows it.
fn weak_coupling_curve(
    table: &Path,
    times: &[f64],
    out: &Path,
    label: &str,
) -> Result<Option<PathBuf>> {
    let meta = table.with_file_name("meta.json");
    if !meta.is_file() {
        return Ok(None);
    }
    let config = RunConfig::load(&meta)?;
    let sd = config.spectral_density()?;
    let Ok(pred) = WeakCouplingPrediction::new(&sd, config.system.delta) else {
        return Ok(None);
    };
    let rows = times.iter().map(|&t| {
        vec![
            t,
            0.5 * (-pred.gamma_eff * t).exp() * (pred.delta_eff * t).cos(),
        ]
    });
    let path = out.join(format!("fig1d_weak_coupling_{label}.dat"));
    Ok(Some(write_curve(
        &path,
        "t [1/Delta]  Pz weak-coupling [1]",
        rows,
    )?))
}
