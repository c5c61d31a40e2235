use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use qubit_probe::commands::{self, Panel, OUT_DIR_ENV};
use qubit_probe::estimation::{Anchor, FitMode};
use qubit_probe::grid::GridSpec;
use qubit_probe::oracle::DimChoice;
use qubit_probe::scenario::{InitialState, ScenarioConfig, WignerSettings};
use qubit_probe::{Error, Result};

/// Qubit probe of a damped harmonic oscillator.
#[derive(Parser, Debug)]
#[command(name = "qprobe", version)]
struct Cli {
    #[command(flatten)]
    scenario: ScenarioFlags,

    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    out_dir: PathBuf,

    /// Seed for measurement noise and random oracle points.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

/// Scenario overrides; each flag replaces the corresponding config entry.
#[derive(Args, Debug, Default)]
struct ScenarioFlags {
    /// JSON scenario file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Qubit-oscillator coupling.
    #[arg(long, global = true)]
    g: Option<f64>,
    /// Damping rate.
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// Qubit detuning.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Bath occupation.
    #[arg(long, global = true, conflicts_with = "temperature")]
    nbar: Option<f64>,
    /// Dimensionless bath temperature; sets the occupation to 1/(e^(1/D) - 1).
    #[arg(long, global = true)]
    temperature: Option<f64>,
    /// Initial thermal occupation of the oscillator.
    #[arg(long, global = true)]
    mbar: Option<f64>,
    /// Last time sample.
    #[arg(long, global = true)]
    t_max: Option<f64>,
    /// Time step.
    #[arg(long, global = true)]
    dt: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kernels, coherence and generalized fidelity over the time grid.
    Propagate {
        /// Relative Gaussian noise added as an `f_gen_obs` column.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
    },
    /// Reduced Wigner function grids.
    Wigner {
        /// Snapshot times (comma separated).
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
        /// Grid spacing.
        #[arg(long)]
        step: Option<f64>,
        /// Fixed bounds `q_min,q_max,p_min,p_max`; chosen automatically otherwise.
        #[arg(long, value_delimiter = ',', num_args = 4)]
        bounds: Option<Vec<f64>>,
    },
    /// Fidelities and purities over the time grid.
    Fidelity,
    /// Compare the closed forms with the Fock-basis integration.
    Oracle {
        /// Number of random parameter points.
        #[arg(long)]
        points: Option<usize>,
        /// Fixed Fock truncation.
        #[arg(long)]
        dim: Option<usize>,
        /// Also check the scenario parameters at the last time sample.
        #[arg(long)]
        scenario_point: bool,
    },
    /// Fit coupling, damping and temperatures to coherence records.
    Estimate {
        /// Series CSV files (columns `t` and `f_gen_obs` or `f_gen`).
        #[arg(long = "input", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::DirectFit)]
        method: Method,
        /// Known bath occupation; the initial state is then fitted.
        #[arg(long)]
        known_nbar: Option<f64>,
    },
    /// Data and plotting stubs for the figures.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
        /// Grid spacing of the snapshots.
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    DirectFit,
    TwoTemperature,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Figure {
    Fig1,
    Fig2,
    Fig3,
}

fn scenario(flags: &ScenarioFlags) -> Result<ScenarioConfig> {
    let mut cfg = match &flags.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(v) = flags.g {
        cfg.g = v;
    }
    if let Some(v) = flags.kappa {
        cfg.kappa = v;
    }
    if let Some(v) = flags.delta {
        cfg.delta = v;
    }
    if let Some(v) = flags.nbar {
        cfg.nbar = Some(v);
        cfg.temperature = None;
    }
    if let Some(v) = flags.temperature {
        cfg.temperature = Some(v);
        cfg.nbar = None;
    }
    if let Some(v) = flags.mbar {
        match &cfg.init {
            InitialState::Thermal { .. } => cfg.init = InitialState::Thermal { mbar: v },
            InitialState::Coherent { .. } => {
                return Err(Error::Config("--mbar applies to a thermal initial state only".into()))
            }
        }
    }
    if let Some(v) = flags.t_max {
        cfg.times.stop = v;
    }
    if let Some(v) = flags.dt {
        cfg.times.step = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let out = cli.out_dir.as_path();
    std::fs::create_dir_all(out)?;
    match cli.command {
        Command::Propagate { noise } => {
            let cfg = scenario(&cli.scenario)?;
            report(&[commands::cmd_propagate(&cfg, out, noise, cli.seed.unwrap_or(0))?]);
        }
        Command::Wigner { times, step, bounds } => {
            let cfg = scenario(&cli.scenario)?;
            let settings = cfg.wigner.clone().unwrap_or_default();
            let WignerSettings { times: t0, grid, step: s0 } = settings;
            let step = step.unwrap_or(s0);
            let grid = match bounds {
                Some(b) => Some(GridSpec {
                    q_min: b[0],
                    q_max: b[1],
                    p_min: b[2],
                    p_max: b[3],
                    step,
                }),
                None => grid,
            };
            report(&commands::cmd_wigner(&cfg, out, &times.unwrap_or(t0), grid, step)?);
        }
        Command::Fidelity => {
            let cfg = scenario(&cli.scenario)?;
            report(&[commands::cmd_fidelity(&cfg, out)?]);
        }
        Command::Oracle {
            points,
            dim,
            scenario_point,
        } => {
            let cfg = scenario(&cli.scenario)?;
            let mut settings = cfg.oracle.clone().unwrap_or_default();
            if let Some(n) = points {
                settings.random_points = n;
            }
            if let Some(d) = dim {
                settings.solver.dim = DimChoice::Fixed(d);
            }
            if let Some(s) = cli.seed {
                settings.seed = s;
            }
            settings.scenario_point |= scenario_point;
            settings.solver.validate()?;
            let rep = commands::cmd_oracle(&cfg, &settings, out)?;
            println!("{}", out.join("oracle_report.json").display());
            let d = &rep.max_deviation;
            println!(
                "max deviation: coherence {:.2e}, F_gen {:.2e}, F_UJ {:.2e}, P_q {:.2e}, P_osc {:.2e}",
                d.coherence, d.fidelity_generalized, d.fidelity_uj, d.purity_qubit, d.purity_oscillator
            );
            if !rep.pass {
                eprintln!("oracle check FAILED");
                return Ok(ExitCode::from(1));
            }
            println!("oracle check passed ({} points)", rep.points.len());
        }
        Command::Estimate {
            inputs,
            method,
            known_nbar,
        } => {
            let mode = match (method, known_nbar) {
                (Method::TwoTemperature, None) => FitMode::TwoTemperature,
                (Method::TwoTemperature, Some(_)) => {
                    return Err(Error::Config("--known-nbar applies to the direct fit only".into()))
                }
                (Method::DirectFit, None) => FitMode::Direct(Anchor::SeriesM),
                (Method::DirectFit, Some(n)) => FitMode::Direct(Anchor::KnownN(2.0 * n + 1.0)),
            };
            let rep = commands::cmd_estimate(&inputs, mode, out)?;
            println!("{}", out.join("estimate.json").display());
            println!(
                "g = {:.6}, kappa = {:.6}, M = {:.6}, N = {:.6}",
                rep.g, rep.kappa, rep.m, rep.n
            );
        }
        Command::Reproduce { figure, step } => {
            let paths = match figure {
                Figure::Fig1 => commands::reproduce_fig1(out, step)?,
                Figure::Fig2 | Figure::Fig3 => {
                    let f = &cli.scenario;
                    let (Some(mbar), Some(nbar)) = (f.mbar, f.nbar) else {
                        return Err(Error::Config("fig2/fig3 need both --mbar and --nbar".into()));
                    };
                    let panel = if matches!(figure, Figure::Fig2) {
                        Panel::Generalized
                    } else {
                        Panel::UhlmannJozsa
                    };
                    commands::reproduce_panel(panel, mbar, nbar, f.t_max.unwrap_or(100.0), f.dt.unwrap_or(0.05), out)?
                }
            };
            report(&paths);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
