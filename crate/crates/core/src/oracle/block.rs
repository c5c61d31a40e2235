//! Truncated-basis evolution of the three qubit blocks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrator::{Dopri5, StepControl};
use super::measures::ChordTable;
use super::operators::BlockGenerator;
use crate::error::{Error, Result};
use crate::phase_space::{GaussianState, PhaseVector, SystemParams};

type C = Complex64;

/// Which qubit block a matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    B00,
    B11,
    B01,
}

impl BlockKind {
    /// `(g_L, g_R, Δ_q)` of the block generator.
    fn couplings(self, params: &SystemParams) -> (f64, f64, f64) {
        let g = params.g;
        match self {
            BlockKind::B00 => (g, g, 0.0),
            BlockKind::B11 => (-g, -g, 0.0),
            BlockKind::B01 => (g, -g, params.delta),
        }
    }
}

/// An oscillator-space block `ρ_ij = ⟨i|ρ|j⟩` in the first `dim` number states.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDensityMatrix {
    pub block: BlockKind,
    pub entries: DMatrix<C>,
}

impl BlockDensityMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> C {
        self.entries.trace()
    }

    /// Largest entry of `ρ − ρ†`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Magnitude of the top-level diagonal entry, the truncation-leak indicator.
    pub fn top_population(&self) -> f64 {
        let d = self.dim();
        self.entries[(d - 1, d - 1)].norm()
    }
}

/// Initial block matrix for a displaced thermal state (isotropic covariance).
///
/// Thermal weights are Boltzmann factors renormalised after truncation; the
/// displacement `exp(i(p₀x − x₀p))` is applied in the truncated basis and the
/// trace renormalised again. All three blocks start from the same matrix.
pub fn initial_matrix(block: BlockKind, dim: usize, init: &GaussianState) -> Result<BlockDensityMatrix> {
    if dim < 2 {
        return Err(Error::Config(format!("truncation dimension must be >= 2, got {dim}")));
    }
    let cov = init.cov;
    if cov.xp().abs() > 1e-14 || (cov.xx() - cov.pp()).abs() > 1e-14 {
        return Err(Error::Config(
            "the Fock oracle only supports isotropic (displaced thermal) initial states".into(),
        ));
    }
    let mbar = (cov.xx() - 0.5).max(0.0);
    let ratio = mbar / (mbar + 1.0);
    let weights: Vec<f64> = (0..dim).map(|n| ratio.powi(n as i32)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C::new(weights[i] / total, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    });
    if init.center.norm() > 0.0 {
        let r = PhaseVector::new(init.center[1], -init.center[0]);
        let disp = ChordTable::new(dim).operator(&r);
        rho = &disp * rho * disp.adjoint();
        let tr = rho.trace();
        rho /= tr;
    }
    Ok(BlockDensityMatrix { block, entries: rho })
}

/// How the truncation dimension is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DimChoice {
    /// Start from [`default_dim`] and double until the leak guard passes.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub dim: DimChoice,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest tolerated top-level population.
    pub leak_limit: f64,
    /// Upper bound for automatic doubling.
    pub max_dim: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            dim: DimChoice::Auto,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            leak_limit: 1e-8,
            max_dim: 512,
        }
    }
}

impl OracleConfig {
    pub fn fixed(dim: usize) -> Self {
        Self {
            dim: DimChoice::Fixed(dim),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let DimChoice::Fixed(d) = self.dim {
            if d < 2 {
                return Err(Error::Config(format!("truncation dimension must be >= 2, got {d}")));
            }
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.leak_limit > 0.0) {
            return Err(Error::Config("oracle tolerances must be positive".into()));
        }
        Ok(())
    }

    fn control(&self) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            ..StepControl::default()
        }
    }
}

/// `max(30, ⌈8(n̄ + m̄ + 1) + 6(2g)²⌉)`, with the initial displacement counted
/// in `m̄`.
pub fn default_dim(params: &SystemParams, init: &GaussianState) -> usize {
    let occupation = (init.cov.xx() - 0.5).max(0.0) + 0.5 * init.center.norm_squared();
    let g2 = (2.0 * params.g).powi(2);
    let est = 8.0 * (params.nbar + occupation + 1.0) + 6.0 * g2;
    (est.ceil() as usize).max(30)
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::Domain("sample times must be finite and >= 0".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("sample times must be non-decreasing".into()));
    }
    Ok(())
}

fn leak_guard(m: &BlockDensityMatrix, limit: f64) -> Result<()> {
    let pop = m.top_population();
    if pop > limit {
        return Err(Error::TruncationLeak {
            dim: m.dim(),
            population: pop,
            limit,
            suggested: 2 * m.dim(),
        });
    }
    Ok(())
}

/// Integrates one block from `t = 0` to each of `times`.
///
/// The integration runs in the frame co-rotating with the free oscillator and
/// is mapped back at each sample.
pub fn evolve_block(
    init: &BlockDensityMatrix,
    params: &SystemParams,
    config: &OracleConfig,
    times: &[f64],
) -> Result<Vec<BlockDensityMatrix>> {
    params.validate()?;
    config.validate()?;
    check_times(times)?;
    leak_guard(init, config.leak_limit)?;
    let d = init.dim();
    let (gl, gr, phase) = init.block.couplings(params);
    let gen = BlockGenerator::new(d, params, gl, gr, phase);
    let mut y: Vec<C> = (0..d * d).map(|k| init.entries[(k / d, k % d)]).collect();
    let mut integ = Dopri5::new(|t, y: &[C], out: &mut [C]| gen.apply_rotating(t, y, out), d * d, config.control());
    let mut out = Vec::with_capacity(times.len());
    let mut t_prev = 0.0;
    for &t in times {
        integ.advance(&mut y, t_prev, t)?;
        t_prev = t;
        let mut lab = y.clone();
        gen.to_lab(t, &mut lab);
        let m = BlockDensityMatrix {
            block: init.block,
            entries: DMatrix::from_row_slice(d, d, &lab),
        };
        leak_guard(&m, config.leak_limit)?;
        out.push(m);
    }
    Ok(out)
}

/// The three blocks at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSet {
    pub t: f64,
    pub rho00: BlockDensityMatrix,
    pub rho11: BlockDensityMatrix,
    pub rho01: BlockDensityMatrix,
}

impl BlockSet {
    pub fn dim(&self) -> usize {
        self.rho00.dim()
    }
}

fn evolve_at_dim(params: &SystemParams, init: &GaussianState, times: &[f64], config: &OracleConfig, dim: usize) -> Result<Vec<BlockSet>> {
    let run = |kind| -> Result<Vec<BlockDensityMatrix>> {
        let m0 = initial_matrix(kind, dim, init)?;
        evolve_block(&m0, params, config, times)
    };
    let r00 = run(BlockKind::B00)?;
    let r11 = run(BlockKind::B11)?;
    let r01 = run(BlockKind::B01)?;
    Ok(times
        .iter()
        .zip(r00.into_iter().zip(r11).zip(r01))
        .map(|(&t, ((rho00, rho11), rho01))| BlockSet { t, rho00, rho11, rho01 })
        .collect())
}

/// Evolves all three blocks from a common initial oscillator state.
///
/// With [`DimChoice::Auto`] the dimension doubles after every truncation leak
/// until `max_dim`; with a fixed dimension the leak is returned as an error.
pub fn evolve_blocks(params: &SystemParams, init: &GaussianState, times: &[f64], config: &OracleConfig) -> Result<Vec<BlockSet>> {
    config.validate()?;
    match config.dim {
        DimChoice::Fixed(dim) => evolve_at_dim(params, init, times, config, dim),
        DimChoice::Auto => {
            let mut dim = default_dim(params, init);
            loop {
                match evolve_at_dim(params, init, times, config, dim) {
                    Err(Error::TruncationLeak { .. }) if 2 * dim <= config.max_dim => dim *= 2,
                    other => return other,
                }
            }
        }
    }
}
