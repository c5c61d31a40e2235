//! Scenario configuration shared by the command-line tool and the examples.
//!
//! A scenario is a JSON document; unknown keys are rejected. Example:
//!
//! ```json
//! {
//!   "g": 2.5, "kappa": 0.1, "temperature": 1.0,
//!   "init": { "kind": "thermal", "mbar": 0.0 },
//!   "qubit": { "a00": 0.5, "a11": 0.5, "a01": [0.5, 0.0] },
//!   "times": { "start": 0.0, "stop": 50.0, "step": 0.05 },
//!   "wigner": { "times": [0, 3, 10, 50] },
//!   "oracle": { "random_points": 20, "seed": 2024 }
//! }
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::io::read_json;
use crate::oracle::OracleConfig;
use crate::phase_space::{occupation_from_temperature, Covariance2, GaussianState, PhaseVector, QubitInitState, SystemParams};

/// Most time samples a grid may hold.
pub const MAX_TIME_SAMPLES: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    Thermal {
        mbar: f64,
    },
    /// Displaced Gaussian; covariance `[xx, xp, pp]`, vacuum by default.
    Coherent {
        x0: f64,
        p0: f64,
        #[serde(default = "vacuum_cov")]
        cov: [f64; 3],
    },
}

fn vacuum_cov() -> [f64; 3] {
    [0.5, 0.0, 0.5]
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Thermal { mbar: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSpec {
    pub a00: f64,
    pub a11: f64,
    /// `[re, im]`.
    pub a01: [f64; 2],
}

impl Default for QubitSpec {
    fn default() -> Self {
        Self {
            a00: 0.5,
            a11: 0.5,
            a01: [0.5, 0.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default)]
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 30.0,
            step: 0.05,
        }
    }
}

impl TimeGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.start >= 0.0 && self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Config(format!("time grid bounds must be finite and >= 0: {self:?}")));
        }
        if !(self.step > 0.0) || !(self.stop > self.start) {
            return Err(Error::Config(format!("time grid must be strictly increasing: {self:?}")));
        }
        if (self.stop - self.start) / self.step > MAX_TIME_SAMPLES as f64 {
            return Err(Error::Config("time grid has too many samples".into()));
        }
        Ok(())
    }

    /// `start + k·step` for `k = 0 … round((stop − start)/step)`.
    pub fn samples(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let n = ((self.stop - self.start) / self.step).round() as usize;
        Ok((0..=n).map(|k| self.start + k as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerSettings {
    #[serde(default = "default_wigner_times")]
    pub times: Vec<f64>,
    /// Bounds chosen around the Gaussian components when absent.
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default = "default_wigner_step")]
    pub step: f64,
}

fn default_wigner_times() -> Vec<f64> {
    vec![0.0, 3.0, 10.0, 50.0]
}

fn default_wigner_step() -> f64 {
    0.05
}

impl Default for WignerSettings {
    fn default() -> Self {
        Self {
            times: default_wigner_times(),
            grid: None,
            step: default_wigner_step(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSettings {
    /// Number of random parameter points in the validation suite.
    #[serde(default = "default_points")]
    pub random_points: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Also compare the scenario's own parameters at the end of its time grid.
    #[serde(default)]
    pub scenario_point: bool,
    #[serde(default)]
    pub solver: OracleConfig,
}

fn default_points() -> usize {
    20
}

fn default_seed() -> u64 {
    2024
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            random_points: default_points(),
            seed: default_seed(),
            scenario_point: false,
            solver: OracleConfig::default(),
        }
    }
}

/// Model parameters, initial state, sampling and optional oracle settings.
/// The bath is given either as `nbar` or as the dimensionless `temperature`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub g: f64,
    pub kappa: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nbar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub init: InitialState,
    #[serde(default)]
    pub qubit: QubitSpec,
    #[serde(default)]
    pub times: TimeGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner: Option<WignerSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSettings>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            g: 0.1,
            kappa: 0.05,
            delta: 0.0,
            nbar: Some(0.0),
            temperature: None,
            init: InitialState::default(),
            qubit: QubitSpec::default(),
            times: TimeGrid::default(),
            wigner: None,
            oracle: None,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            source_name: "<config>".into(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = read_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.nbar, self.temperature) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => {
                return Err(Error::Config(
                    "specify exactly one of `nbar` and `temperature`".into(),
                ))
            }
        }
        self.params()?;
        self.initial_state()?;
        self.qubit()?;
        self.times.validate()?;
        if let Some(w) = &self.wigner {
            if let Some(g) = &w.grid {
                g.validate()?;
            }
            if w.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                return Err(Error::Config("wigner times must be finite and >= 0".into()));
            }
        }
        if let Some(o) = &self.oracle {
            o.solver.validate()?;
        }
        Ok(())
    }

    pub fn nbar_value(&self) -> Result<f64> {
        match (self.nbar, self.temperature) {
            (Some(n), None) => Ok(n),
            (None, Some(d)) => occupation_from_temperature(d),
            _ => Err(Error::Config("specify exactly one of `nbar` and `temperature`".into())),
        }
    }

    pub fn initial_state(&self) -> Result<GaussianState> {
        match self.init {
            InitialState::Thermal { mbar } => GaussianState::thermal(mbar),
            InitialState::Coherent { x0, p0, cov } => {
                GaussianState::new(PhaseVector::new(x0, p0), Covariance2::new(cov[0], cov[1], cov[2])?)
            }
        }
    }

    /// `m̄` of a thermal initial state; for a general Gaussian the value with
    /// the same `det σ₀`.
    pub fn mbar(&self) -> Result<f64> {
        Ok(self.initial_state()?.cov.det().sqrt() - 0.5)
    }

    pub fn params(&self) -> Result<SystemParams> {
        SystemParams::new(self.g, self.kappa, self.delta, self.nbar_value()?, self.mbar()?.max(0.0))
    }

    pub fn qubit(&self) -> Result<QubitInitState> {
        let q = self.qubit;
        QubitInitState::new(q.a00, q.a11, Complex64::new(q.a01[0], q.a01[1]))
    }

    pub fn is_thermal(&self) -> bool {
        matches!(self.init, InitialState::Thermal { .. })
    }
}
