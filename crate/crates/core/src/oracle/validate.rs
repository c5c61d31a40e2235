//! Closed forms against the truncated-basis oracle at sampled parameter points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::block::{evolve_blocks, OracleConfig};
use super::measures::{reduced_quantities, uhlmann_fidelity};
use crate::error::Result;
use crate::fidelity::{fidelity_gen_thermal, fidelity_uj_blocks, purity_oscillator, purity_qubit};
use crate::phase_space::{QubitInitState, SystemParams};
use crate::propagator::coherence_trace;

/// One parameter point, evolved from a thermal initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationPoint {
    pub params: SystemParams,
    pub t: f64,
}

/// Per-quantity numbers, used both for deviations and for tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Deviations {
    pub coherence: f64,
    pub fidelity_generalized: f64,
    pub fidelity_uj: f64,
    pub purity_qubit: f64,
    pub purity_oscillator: f64,
}

impl Deviations {
    pub fn tolerances() -> Self {
        Self {
            coherence: 1e-6,
            fidelity_generalized: 1e-6,
            fidelity_uj: 1e-5,
            purity_qubit: 1e-6,
            purity_oscillator: 1e-6,
        }
    }

    fn max(self, o: Self) -> Self {
        Self {
            coherence: self.coherence.max(o.coherence),
            fidelity_generalized: self.fidelity_generalized.max(o.fidelity_generalized),
            fidelity_uj: self.fidelity_uj.max(o.fidelity_uj),
            purity_qubit: self.purity_qubit.max(o.purity_qubit),
            purity_oscillator: self.purity_oscillator.max(o.purity_oscillator),
        }
    }

    /// True when every entry is below the matching entry of `tol`. NaN fails.
    pub fn within(&self, tol: &Self) -> bool {
        self.coherence < tol.coherence
            && self.fidelity_generalized < tol.fidelity_generalized
            && self.fidelity_uj < tol.fidelity_uj
            && self.purity_qubit < tol.purity_qubit
            && self.purity_oscillator < tol.purity_oscillator
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub point: ValidationPoint,
    pub dim: usize,
    pub analytic: Deviations,
    pub oracle: Deviations,
    pub deviation: Deviations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub points: Vec<PointReport>,
    pub max_deviation: Deviations,
    pub tolerances: Deviations,
    pub pass: bool,
}

/// Points with `g ∈ (0, 0.3]`, `κ ∈ (0, 0.2]`, `n̄, m̄ ∈ [0, 2]`, `Δ ∈ [0, 1]`, `t ∈ (0, 20]`.
pub fn random_points(n: usize, seed: u64) -> Vec<ValidationPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let g = 0.3 * (1.0 - rng.random::<f64>());
            let kappa = 0.2 * (1.0 - rng.random::<f64>());
            let nbar = 2.0 * rng.random::<f64>();
            let mbar = 2.0 * rng.random::<f64>();
            let delta = rng.random::<f64>();
            let t = 20.0 * (1.0 - rng.random::<f64>());
            ValidationPoint {
                params: SystemParams {
                    g,
                    kappa,
                    delta,
                    nbar,
                    mbar,
                },
                t,
            }
        })
        .collect()
}

/// Analytic and oracle values of every compared quantity at one point. The
/// coherence entry holds `|Tr ρ₀₁|`, the deviation the complex distance.
pub fn compare_point(point: &ValidationPoint, config: &OracleConfig) -> Result<PointReport> {
    let params = &point.params;
    params.validate()?;
    let t = point.t;
    let m = params.big_m();
    let init = params.thermal_init();
    let qubit = QubitInitState::plus();

    let sets = evolve_blocks(params, &init, &[t], config)?;
    let blocks = &sets[0];
    let reduced = reduced_quantities(blocks, &qubit, None)?;
    let tr01 = blocks.rho01.trace();
    let oracle = Deviations {
        coherence: tr01.norm(),
        fidelity_generalized: tr01.norm_sqr(),
        fidelity_uj: uhlmann_fidelity(&blocks.rho00.entries, &blocks.rho11.entries)?,
        purity_qubit: reduced.purity_qubit,
        purity_oscillator: reduced.purity_oscillator,
    };

    let coherence = coherence_trace(t, params, &init)?;
    let analytic = Deviations {
        coherence: coherence.norm(),
        fidelity_generalized: fidelity_gen_thermal(t, params, m)?,
        fidelity_uj: fidelity_uj_blocks(t, params, m)?,
        purity_qubit: purity_qubit(t, params, m, &qubit)?,
        purity_oscillator: purity_oscillator(t, params, m, &qubit)?,
    };
    let deviation = Deviations {
        coherence: (coherence - tr01).norm(),
        fidelity_generalized: (analytic.fidelity_generalized - oracle.fidelity_generalized).abs(),
        fidelity_uj: (analytic.fidelity_uj - oracle.fidelity_uj).abs(),
        purity_qubit: (analytic.purity_qubit - oracle.purity_qubit).abs(),
        purity_oscillator: (analytic.purity_oscillator - oracle.purity_oscillator).abs(),
    };
    Ok(PointReport {
        point: *point,
        dim: blocks.dim(),
        analytic,
        oracle,
        deviation,
    })
}

/// Runs every point (in parallel) and aggregates maximum deviations.
pub fn run_validation(points: &[ValidationPoint], config: &OracleConfig) -> Result<ValidationReport> {
    let reports = points
        .par_iter()
        .map(|p| compare_point(p, config))
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = reports.iter().fold(Deviations::default(), |acc, r| acc.max(r.deviation));
    let tolerances = Deviations::tolerances();
    Ok(ValidationReport {
        pass: max_deviation.within(&tolerances),
        points: reports,
        max_deviation,
        tolerances,
    })
}
