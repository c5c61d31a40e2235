//! Sampled phase-space fields.
//!
//! Values are stored row-major with `q` varying fastest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::PhaseVector;

/// Largest grid accepted by the sampling routines.
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// Bounds and spacing of a rectangular phase-space grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn square(half_width: f64, step: f64) -> Self {
        Self {
            q_min: -half_width,
            q_max: half_width,
            p_min: -half_width,
            p_max: half_width,
            step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.q_min, self.q_max, self.p_min, self.p_max, self.step]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        if !(self.step > 0.0) || self.q_max <= self.q_min || self.p_max <= self.p_min {
            return Err(Error::Config(format!("invalid grid {self:?}")));
        }
        let n = self.nq().saturating_mul(self.np());
        if n > MAX_GRID_POINTS {
            return Err(Error::Config(format!(
                "grid has {n} points, more than the limit {MAX_GRID_POINTS}"
            )));
        }
        Ok(())
    }

    pub fn nq(&self) -> usize {
        ((self.q_max - self.q_min) / self.step).round() as usize + 1
    }

    pub fn np(&self) -> usize {
        ((self.p_max - self.p_min) / self.step).round() as usize + 1
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q_min + i as f64 * self.step
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.step
    }

    /// All sample points in storage order.
    pub fn points(&self) -> impl Iterator<Item = PhaseVector> + '_ {
        (0..self.np()).flat_map(move |j| (0..self.nq()).map(move |i| PhaseVector::new(self.q(i), self.p(j))))
    }
}

/// A real field sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl PhaseGrid {
    pub fn from_fn<F>(spec: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(&PhaseVector) -> f64,
    {
        spec.validate()?;
        let values = spec.points().map(|x| f(&x)).collect();
        Ok(Self { spec, values })
    }

    /// Wraps values already laid out in storage order.
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.nq() * spec.np() {
            return Err(Error::Config(format!(
                "grid expects {} values, got {}",
                spec.nq() * spec.np(),
                values.len()
            )));
        }
        Ok(Self { spec, values })
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nq() + i]
    }

    /// Riemann sum times cell area.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.step * self.spec.step
    }

    /// Location of the largest sample inside the box `[q0,q1]×[p0,p1]`,
    /// refined to sub-grid accuracy by fitting a parabola to the logarithm
    /// along each axis (exact for an axis-aligned Gaussian).
    pub fn peak_in(&self, q0: f64, q1: f64, p0: f64, p1: f64) -> Option<PhaseVector> {
        let (nq, np) = (self.spec.nq(), self.spec.np());
        let mut best: Option<(usize, usize, f64)> = None;
        for j in 0..np {
            let p = self.spec.p(j);
            if p < p0 || p > p1 {
                continue;
            }
            for i in 0..nq {
                let q = self.spec.q(i);
                if q < q0 || q > q1 {
                    continue;
                }
                let v = self.at(i, j);
                if best.is_none_or(|(_, _, b)| v > b) {
                    best = Some((i, j, v));
                }
            }
        }
        let (i, j, v) = best?;
        if !(v > 0.0) {
            return None;
        }
        let refine = |lo: Option<f64>, mid: f64, hi: Option<f64>| -> f64 {
            match (lo, hi) {
                (Some(a), Some(c)) if a > 0.0 && c > 0.0 => {
                    let (la, lb, lc) = (a.ln(), mid.ln(), c.ln());
                    let den = la - 2.0 * lb + lc;
                    if den < 0.0 {
                        0.5 * (la - lc) / den
                    } else {
                        0.0
                    }
                }
                _ => 0.0,
            }
        };
        let dq = refine(
            (i > 0).then(|| self.at(i - 1, j)),
            v,
            (i + 1 < nq).then(|| self.at(i + 1, j)),
        );
        let dp = refine(
            (j > 0).then(|| self.at(i, j - 1)),
            v,
            (j + 1 < np).then(|| self.at(i, j + 1)),
        );
        Some(PhaseVector::new(
            self.spec.q(i) + dq * self.spec.step,
            self.spec.p(j) + dp * self.spec.step,
        ))
    }
}
