//! Phase-space snapshots of the oscillator at strong coupling.
//!
//! Writes the grids, centre trajectories and a plotting stub into the
//! directory named by the first argument (default `fig1_out`).

use std::path::PathBuf;

use qubit_probe::commands::{fig1_scenario, reproduce_fig1, FIG1_TIMES};
use qubit_probe::io::{grid_from_table, read_table};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fig1_out".into()));
    let paths = reproduce_fig1(&out, 0.05)?;
    let params = fig1_scenario().params()?;
    println!("g = {}, kappa = {}, nbar = {:.4}", params.g, params.kappa, params.nbar);
    for (t, path) in FIG1_TIMES.iter().zip(&paths) {
        let grid = grid_from_table(&read_table(path)?, path)?;
        let s = grid.spec;
        let right = grid.peak_in(0.0, s.q_max, s.p_min, s.p_max);
        let left = grid.peak_in(s.q_min, 0.0, s.p_min, s.p_max);
        println!(
            "t = {t:>4}: {} x {} points, integral {:.6}, peaks {:?} {:?}",
            s.nq(),
            s.np(),
            grid.integral(),
            left.map(|v| (v[0], v[1])),
            right.map(|v| (v[0], v[1]))
        );
    }
    Ok(())
}
