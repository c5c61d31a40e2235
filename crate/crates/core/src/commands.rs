//! File-producing drivers behind the `qprobe` subcommands.
//!
//! Every driver is deterministic given its inputs (and seed), writes into an
//! output directory and returns what it wrote.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::estimation::{fit_parameters, EstimateReport, FitMode};
use crate::fidelity::{fidelity_gen_thermal, fidelity_generalized, fidelity_uj_blocks, fidelity_uj_general};
use crate::grid::{GridSpec, PhaseGrid, MAX_GRID_POINTS};
use crate::io::{grid_to_table, read_series, write_json, write_table, Table};
use crate::oracle::{random_points, run_validation, ValidationPoint, ValidationReport};
use crate::phase_space::{GaussianState, QubitInitState, SystemParams};
use crate::propagator::{block_states, kernel_at, reduced_wigner, DiagBlock};
use crate::scenario::{OracleSettings, ScenarioConfig};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "QPROBE_OUT_DIR";

fn param_meta(table: Table, params: &SystemParams) -> Table {
    table
        .with_meta("g", params.g)
        .with_meta("kappa", params.kappa)
        .with_meta("delta", params.delta)
        .with_meta("nbar", params.nbar)
        .with_meta("mbar", params.mbar)
        .with_meta("N", params.big_n())
}

/// Kernels, coherence and `F_gen` over the scenario's time grid.
///
/// With `noise > 0` an extra column `f_gen_obs` holds `F_gen·(1 + noise·ξ)`,
/// `ξ` standard normal drawn from a generator seeded with `seed`
/// (redrawn while the factor is not positive).
pub fn cmd_propagate(cfg: &ScenarioConfig, out_dir: &Path, noise: f64, seed: u64) -> Result<PathBuf> {
    cfg.validate()?;
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::Domain(format!("noise level must be >= 0, got {noise}")));
    }
    let params = cfg.params()?;
    let init = cfg.initial_state()?;
    let mut columns = vec![
        "t", "r11", "r12", "r21", "r22", "d1", "d2", "alpha", "eta1", "eta2", "delta", "gamma1", "gamma2", "sigma_xx",
        "sigma_xp", "sigma_pp", "coh_re", "coh_im", "f_gen",
    ];
    if noise > 0.0 {
        columns.push("f_gen_obs");
    }
    let mut table = param_meta(Table::new(columns), &params)
        .with_meta("M", init.cov.det().sqrt())
        .with_meta("x0", init.center[0])
        .with_meta("p0", init.center[1]);
    if noise > 0.0 {
        table = table.with_meta("noise", noise).with_meta("seed", seed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in cfg.times.samples()? {
        let k = kernel_at(t, &params, &init.cov)?;
        let coh = k.coherence(&init);
        let f = fidelity_generalized(t, &params, &init)?;
        let mut row = vec![
            t,
            k.r[(0, 0)],
            k.r[(0, 1)],
            k.r[(1, 0)],
            k.r[(1, 1)],
            k.d[0],
            k.d[1],
            k.alpha,
            k.eta[0],
            k.eta[1],
            k.delta,
            k.gamma[0],
            k.gamma[1],
            k.sigma.xx(),
            k.sigma.xp(),
            k.sigma.pp(),
            coh.re,
            coh.im,
            f,
        ];
        if noise > 0.0 {
            let factor = loop {
                let xi: f64 = StandardNormal.sample(&mut rng);
                if 1.0 + noise * xi > 0.0 {
                    break 1.0 + noise * xi;
                }
            };
            row.push(f * factor);
        }
        table.push(row);
    }
    let path = out_dir.join("propagate.csv");
    write_table(&path, &table)?;
    Ok(path)
}

/// Bounds enclosing both Gaussian components with a margin of six standard
/// deviations, snapped to multiples of `step`.
pub fn auto_grid(params: &SystemParams, init: &GaussianState, t: f64, step: f64) -> Result<GridSpec> {
    let (a, b) = block_states(t, params, init)?;
    let width = 6.0 * a.cov.xx().max(a.cov.pp()).sqrt() + 0.5;
    let snap_down = |v: f64| (v / step).floor() * step;
    let snap_up = |v: f64| (v / step).ceil() * step;
    let spec = GridSpec {
        q_min: snap_down(a.center[0].min(b.center[0]) - width),
        q_max: snap_up(a.center[0].max(b.center[0]) + width),
        p_min: snap_down(a.center[1].min(b.center[1]) - width),
        p_max: snap_up(a.center[1].max(b.center[1]) + width),
        step,
    };
    spec.validate()?;
    Ok(spec)
}

/// The analytic reduced Wigner function sampled on a grid.
pub fn wigner_field(params: &SystemParams, init: &GaussianState, qubit: &QubitInitState, t: f64, spec: GridSpec) -> Result<PhaseGrid> {
    spec.validate()?;
    let (a, b) = block_states(t, params, init)?;
    PhaseGrid::from_fn(spec, |x| qubit.a00() * a.wigner(x) + qubit.a11() * b.wigner(x))
}

fn time_tag(t: f64) -> String {
    format!("{t}")
}

/// One `wigner_t<t>.csv` per requested time. Grids above
/// [`MAX_GRID_POINTS`] are refused before anything is written.
pub fn cmd_wigner(cfg: &ScenarioConfig, out_dir: &Path, times: &[f64], grid: Option<GridSpec>, step: f64) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let params = cfg.params()?;
    let init = cfg.initial_state()?;
    let qubit = cfg.qubit()?;
    let specs = times
        .iter()
        .map(|&t| match grid {
            Some(g) => g.validate().map(|_| g),
            None => auto_grid(&params, &init, t, step),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut paths = Vec::new();
    for (&t, spec) in times.iter().zip(specs) {
        debug_assert!(spec.nq() * spec.np() <= MAX_GRID_POINTS);
        let field = wigner_field(&params, &init, &qubit, t, spec)?;
        let table = param_meta(grid_to_table(&field), &params).with_meta("t", t);
        let path = out_dir.join(format!("wigner_t{}.csv", time_tag(t)));
        write_table(&path, &table)?;
        paths.push(path);
    }
    Ok(paths)
}

/// `(F_gen, F_UJ, P_q, P_osc)` at time `t`.
pub fn fidelity_row(t: f64, params: &SystemParams, init: &GaussianState, qubit: &QubitInitState, thermal: bool) -> Result<[f64; 4]> {
    let (fg, fu) = if thermal {
        let m = init.cov.xx();
        (fidelity_gen_thermal(t, params, m)?, fidelity_uj_blocks(t, params, m)?)
    } else {
        (fidelity_generalized(t, params, init)?, fidelity_uj_general(t, params, init)?)
    };
    let (a, b) = (qubit.a00(), qubit.a11());
    let pq = a * a + b * b + 2.0 * qubit.a01().norm_sqr() * fg;
    let sigma = kernel_at(t, params, &init.cov)?.sigma;
    let posc = (a * a + b * b + 2.0 * a * b * fu) / (2.0 * sigma.det().sqrt());
    Ok([fg, fu, pq, posc])
}

/// `fidelity.csv` with columns `t, f_gen, f_uj, p_q, p_osc`.
pub fn cmd_fidelity(cfg: &ScenarioConfig, out_dir: &Path) -> Result<PathBuf> {
    cfg.validate()?;
    let params = cfg.params()?;
    let init = cfg.initial_state()?;
    let qubit = cfg.qubit()?;
    let thermal = cfg.is_thermal();
    let mut table = param_meta(Table::new(["t", "f_gen", "f_uj", "p_q", "p_osc"]), &params).with_meta("M", init.cov.det().sqrt());
    for t in cfg.times.samples()? {
        let [fg, fu, pq, po] = fidelity_row(t, &params, &init, &qubit, thermal)?;
        table.push(vec![t, fg, fu, pq, po]);
    }
    let path = out_dir.join("fidelity.csv");
    write_table(&path, &table)?;
    Ok(path)
}

/// Runs the validation suite and writes `oracle_report.json`. The caller
/// decides the exit status from [`ValidationReport::pass`].
pub fn cmd_oracle(cfg: &ScenarioConfig, settings: &OracleSettings, out_dir: &Path) -> Result<ValidationReport> {
    cfg.validate()?;
    let mut points = random_points(settings.random_points, settings.seed);
    if settings.scenario_point {
        if !cfg.is_thermal() {
            return Err(Error::Config("the scenario point needs a thermal initial state".into()));
        }
        points.push(ValidationPoint {
            params: cfg.params()?,
            t: cfg.times.stop,
        });
    }
    if points.is_empty() {
        return Err(Error::Config("no validation points requested".into()));
    }
    let report = run_validation(&points, &settings.solver)?;
    write_json(&out_dir.join("oracle_report.json"), &report)?;
    Ok(report)
}

/// Fits the series in `inputs` and writes `estimate.json`.
pub fn cmd_estimate(inputs: &[PathBuf], mode: FitMode, out_dir: &Path) -> Result<EstimateReport> {
    let series = inputs.iter().map(|p| read_series(p)).collect::<Result<Vec<_>>>()?;
    let report = fit_parameters(&series, mode)?;
    write_json(&out_dir.join("estimate.json"), &report)?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// figure data

/// Times shown in the phase-space snapshots.
pub const FIG1_TIMES: [f64; 4] = [0.0, 3.0, 10.0, 50.0];

/// Couplings and damping rates of the fidelity panels.
pub const PANEL_COUPLINGS: [f64; 3] = [0.05, 0.1, 0.2];
pub const PANEL_DAMPINGS: [f64; 2] = [0.01, 0.1];

/// Strong-coupling snapshot scenario: `g = 2.5`, `κ = 0.1`, `D = 1`, ground
/// state, symmetric qubit superposition.
pub fn fig1_scenario() -> ScenarioConfig {
    ScenarioConfig {
        g: 2.5,
        kappa: 0.1,
        nbar: None,
        temperature: Some(1.0),
        ..ScenarioConfig::default()
    }
}

const FIG1_SCRIPT: &str = r##"import glob, numpy as np, matplotlib.pyplot as plt

files = sorted(glob.glob("fig1_wigner_t*.csv"), key=lambda f: float(f[13:-4]))
c = np.genfromtxt("fig1_centres.csv", delimiter=",", names=True, comments="#")
fig, axes = plt.subplots(1, len(files), figsize=(4 * len(files), 4))
for ax, f in zip(np.atleast_1d(axes), files):
    d = np.genfromtxt(f, delimiter=",", names=True, comments="#")
    q, p = np.unique(d["q"]), np.unique(d["p"])
    ax.pcolormesh(q, p, d["w"].reshape(len(p), len(q)), shading="auto")
    ax.plot(c["q_plus"], c["p_plus"], "g", lw=0.6)
    ax.plot(c["q_minus"], c["p_minus"], "b", lw=0.6)
    ax.set_title(f[11:-4]); ax.set_xlabel("q"); ax.set_ylabel("p")
plt.tight_layout(); plt.savefig("fig1.png", dpi=150)
"##;

/// Snapshots at [`FIG1_TIMES`], component centre trajectories and a plotting stub.
pub fn reproduce_fig1(out_dir: &Path, step: f64) -> Result<Vec<PathBuf>> {
    let cfg = fig1_scenario();
    let params = cfg.params()?;
    let init = cfg.initial_state()?;
    let qubit = cfg.qubit()?;
    let mut paths = Vec::new();
    for &t in &FIG1_TIMES {
        let spec = auto_grid(&params, &init, t, step)?;
        let field = wigner_field(&params, &init, &qubit, t, spec)?;
        let table = param_meta(grid_to_table(&field), &params).with_meta("t", t);
        let path = out_dir.join(format!("fig1_wigner_t{}.csv", time_tag(t)));
        write_table(&path, &table)?;
        paths.push(path);
    }
    let mut centres = param_meta(Table::new(["t", "q_plus", "p_plus", "q_minus", "p_minus", "d1", "d2"]), &params);
    for k in 0..=1000 {
        let t = k as f64 * 0.05;
        let kern = kernel_at(t, &params, &init.cov)?;
        let a = kern.block_state(&init, DiagBlock::Plus).center;
        let b = kern.block_state(&init, DiagBlock::Minus).center;
        centres.push(vec![t, a[0], a[1], b[0], b[1], kern.d[0], kern.d[1]]);
    }
    let path = out_dir.join("fig1_centres.csv");
    write_table(&path, &centres)?;
    paths.push(path);
    let script = out_dir.join("fig1.py");
    std::fs::write(&script, FIG1_SCRIPT)?;
    paths.push(script);
    Ok(paths)
}

/// Which fidelity a panel shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Panel {
    Generalized,
    UhlmannJozsa,
}

fn panel_script(name: &str, ylabel: &str) -> String {
    format!(
        r##"import numpy as np, matplotlib.pyplot as plt, sys

f = sys.argv[1] if len(sys.argv) > 1 else "{name}.csv"
d = np.genfromtxt(f, delimiter=",", names=True, comments="#")
shade = {{"0.05": "#8ecae6", "0.1": "#219ebc", "0.2": "#023047"}}
for col in d.dtype.names[1:]:
    g, k = col.split("_")[1][1:], col.split("_")[2][1:]
    plt.plot(d["t"], d[col], color=shade.get(g, "k"), ls="-" if k == "0.01" else "--", label=col)
plt.xlabel("t"); plt.ylabel("{ylabel}"); plt.legend(fontsize=7)
plt.savefig(f.replace(".csv", ".png"), dpi=150)
"##
    )
}

/// One panel: curves for every coupling in [`PANEL_COUPLINGS`] and damping in
/// [`PANEL_DAMPINGS`] at the given thermal occupations.
pub fn reproduce_panel(panel: Panel, mbar: f64, nbar: f64, t_max: f64, dt: f64, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let grid = crate::scenario::TimeGrid {
        start: 0.0,
        stop: t_max,
        step: dt,
    };
    let times = grid.samples()?;
    let m = mbar + 0.5;
    let mut curves = Vec::new();
    let mut names = vec!["t".to_string()];
    for &kappa in &PANEL_DAMPINGS {
        for &g in &PANEL_COUPLINGS {
            let params = SystemParams::new(g, kappa, 0.0, nbar, mbar)?;
            let values = times
                .iter()
                .map(|&t| match panel {
                    Panel::Generalized => fidelity_gen_thermal(t, &params, m),
                    Panel::UhlmannJozsa => fidelity_uj_blocks(t, &params, m),
                })
                .collect::<Result<Vec<_>>>()?;
            names.push(format!("F_g{g}_k{kappa}"));
            curves.push(values);
        }
    }
    let (stem, ylabel) = match panel {
        Panel::Generalized => ("fig2", "F_gen"),
        Panel::UhlmannJozsa => ("fig3", "F_UJ"),
    };
    let name = format!("{stem}_mbar{mbar}_nbar{nbar}");
    let mut table = Table::new(names).with_meta("mbar", mbar).with_meta("nbar", nbar);
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![t];
        row.extend(curves.iter().map(|c| c[i]));
        table.push(row);
    }
    let csv = out_dir.join(format!("{name}.csv"));
    write_table(&csv, &table)?;
    let script = out_dir.join(format!("{name}.py"));
    std::fs::write(&script, panel_script(&name, ylabel))?;
    Ok(vec![csv, script])
}

/// Reduced Wigner value, re-exported for the examples.
pub fn wigner_at(cfg: &ScenarioConfig, q: f64, p: f64, t: f64) -> Result<f64> {
    reduced_wigner(&crate::phase_space::PhaseVector::new(q, p), t, &cfg.params()?, &cfg.initial_state()?, &cfg.qubit()?)
}
