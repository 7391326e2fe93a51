//! Build a run configuration in code, write it as TOML and run it through
//! the same entry point as the `openqdyn` binary.
//!
//! Run: cargo run --release --example cli_config -- [out_dir]

use openqdyn::cli::{run_cli, Mode, RunConfig};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out".into());
    let mut cfg = RunConfig::new(Mode::SweepAlpha);
    cfg.tempo.dt = 0.01;
    cfg.tempo.t_max = 3.0;
    cfg.scan.alpha_grid = vec![0.7, 0.75, 0.8, 0.85];

    let path = std::env::temp_dir().join("openqdyn_sweep.toml");
    std::fs::write(&path, cfg.to_toml()).expect("writable temp dir");
    println!("{}", cfg.to_toml());

    let code = run_cli([
        "openqdyn",
        "sweep",
        "--config",
        path.to_str().unwrap(),
        "--out",
        &out,
        "--figure",
        "fig1a",
    ]);
    std::process::exit(code);
}
