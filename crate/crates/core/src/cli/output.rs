//! On-disk artifacts: trajectory tables, metadata sidecars, curve files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::tempo::Trajectory;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const TRAJECTORY_HEADER: &str = "t,Px,Py,Pz,trunc_err";
pub const PHASE_BOUNDARY_HEADER: &str = "s,alpha_B,alpha_lo,alpha_hi,t_max,p_min,alpha_o_eq6";

/// Shortest decimal form with at most 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // Round first so that the exponent reflects the rounded value.
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * traj.len());
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for i in 0..traj.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_sig(traj.times[i]),
            fmt_sig(traj.px[i]),
            fmt_sig(traj.py[i]),
            fmt_sig(traj.pz[i]),
            fmt_sig(traj.truncation_error[i])
        );
    }
    out
}

/// Columns of a trajectory table read back from disk.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryTable {
    pub t: Vec<f64>,
    pub px: Vec<f64>,
    pub py: Vec<f64>,
    pub pz: Vec<f64>,
    pub trunc_err: Vec<f64>,
}

pub fn read_trajectory_csv(path: &Path) -> Result<TrajectoryTable> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(TRAJECTORY_HEADER) {
        return Err(Error::Config(format!(
            "{} is not a trajectory table",
            path.display()
        )));
    }
    let mut table = TrajectoryTable::default();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("{}:{}: {e}", path.display(), n + 2)))?;
        if cols.len() != 5 {
            return Err(Error::Config(format!(
                "{}:{}: expected 5 columns",
                path.display(),
                n + 2
            )));
        }
        table.t.push(cols[0]);
        table.px.push(cols[1]);
        table.py.push(cols[2]);
        table.pz.push(cols[3]);
        table.trunc_err.push(cols[4]);
    }
    Ok(table)
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub steps: usize,
    pub final_truncation_error: f64,
    pub max_bond_dim: usize,
    pub max_trace_deviation: f64,
    pub max_bloch_excess: f64,
    pub status: &'static str,
}

impl Diagnostics {
    pub fn of(traj: &Trajectory, status: &'static str) -> Self {
        Self {
            steps: traj.len().saturating_sub(1),
            final_truncation_error: traj.truncation_error.last().copied().unwrap_or(0.0),
            max_bond_dim: traj.max_bond_dims.iter().copied().max().unwrap_or(1),
            max_trace_deviation: traj
                .trace
                .iter()
                .map(|t| (t - 1.0).abs())
                .fold(0.0, f64::max),
            max_bloch_excess: (0..traj.len())
                .map(|i| traj.bloch_norm_sq(i) - 0.25)
                .fold(0.0, f64::max),
            status,
        }
    }
}

#[derive(Serialize)]
struct Meta<'a, D: Serialize> {
    config: &'a RunConfig,
    version: &'static str,
    /// Seconds since the Unix epoch; the only non-reproducible field.
    created_unix: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<D>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_bond_dims: Option<&'a [usize]>,
}

pub fn write_meta<D: Serialize>(
    dir: &Path,
    config: &RunConfig,
    diagnostics: Option<D>,
    max_bond_dims: Option<&[usize]>,
) -> Result<PathBuf> {
    let meta = Meta {
        config,
        version: VERSION,
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        diagnostics,
        max_bond_dims,
    };
    let path = dir.join("meta.json");
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(&path, text + "\n")?;
    Ok(path)
}

fn slug_num(x: f64) -> String {
    fmt_sig(x).replace('-', "m")
}

/// Deterministic directory name derived from the physical parameters.
pub fn run_id(config: &RunConfig) -> String {
    if let Some(id) = &config.output.run_id {
        return id.clone();
    }
    let (sys, bath, tempo) = (&config.system, &config.bath, &config.tempo);
    let mut id = format!(
        "{}_a{}_s{}_wc{}_d{}",
        config.mode.as_str(),
        slug_num(bath.alpha),
        slug_num(bath.s),
        slug_num(bath.omega_c),
        slug_num(sys.delta)
    );
    if sys.phi != 0.0 {
        id += &format!("_phi{}", slug_num(sys.phi));
    }
    if sys.bias != 0.0 {
        id += &format!("_eps{}", slug_num(sys.bias));
    }
    if let Some(b) = sys.beta {
        id += &format!("_beta{}", slug_num(b));
    }
    id += &format!("_dt{}_T{}", slug_num(tempo.dt), slug_num(tempo.t_max));
    id
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(-0.125), "-0.125");
        assert_eq!(fmt_sig(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(1e-7), "1e-7");
        assert_eq!(fmt_sig(1.23456789012345e-9), "1.23456789012e-9");
        assert_eq!(fmt_sig(123456.0), "123456");
        assert_eq!(fmt_sig(9.9999999999999e-6), "0.00001");
        assert_eq!(fmt_sig(2.5e15), "2.5e15");
    }

    #[test]
    fn parses_what_it_formats() {
        for x in [0.1, -0.37, 1e-12, 12345.678901234, 0.49999999999999] {
            let back: f64 = fmt_sig(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-11 * x.abs());
        }
    }
}
