//! Phase-space domain types shared by every other module.
//!
//! Units are dimensionless throughout: energies in units of the oscillator
//! quantum, times in units of the inverse oscillator frequency. Position and
//! momentum are the quadratures `x = (a + a†)/√2`, `p = i(a† − a)/√2`, so the
//! vacuum has covariance `½·𝟙`.
//!
//! A Gaussian state is stored as its first moments and its symmetric
//! covariance matrix. Its chord function (the quantum characteristic function
//! `w(r) = Tr[ρ exp(i(k x + s p))]`) and Wigner function are dual forms.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A point in phase space, `(q, p)`, or in chord space, `(k, s)`.
pub type PhaseVector = Vector2<f64>;

/// Real 2×2 matrix.
pub type Mat2 = Matrix2<f64>;

/// Slack admitted on `det σ ≥ ¼` so that exactly pure states survive rounding.
pub const PURITY_SLACK: f64 = 1e-12;

/// Physical constants of the qubit–oscillator–bath model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Qubit–oscillator coupling.
    pub g: f64,
    /// Dissipation rate `κ = γ₀/ω₀`.
    pub kappa: f64,
    /// Qubit splitting.
    pub delta: f64,
    /// Bath mean occupation.
    pub nbar: f64,
    /// Mean occupation of the initial thermal state.
    pub mbar: f64,
}

impl SystemParams {
    pub fn new(g: f64, kappa: f64, delta: f64, nbar: f64, mbar: f64) -> Result<Self> {
        let p = Self {
            g,
            kappa,
            delta,
            nbar,
            mbar,
        };
        p.validate()?;
        Ok(p)
    }

    /// Same as [`SystemParams::new`] with the bath given by its dimensionless
    /// temperature `D = k_B T / ħω₀`.
    pub fn with_temperature(g: f64, kappa: f64, delta: f64, temperature: f64, mbar: f64) -> Result<Self> {
        Self::new(g, kappa, delta, occupation_from_temperature(temperature)?, mbar)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g", self.g),
            ("kappa", self.kappa),
            ("delta", self.delta),
            ("nbar", self.nbar),
            ("mbar", self.mbar),
        ] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite, got {v}")));
            }
        }
        if self.kappa < 0.0 {
            return Err(Error::Domain(format!("kappa must be >= 0, got {}", self.kappa)));
        }
        if self.nbar < 0.0 {
            return Err(Error::Domain(format!("nbar must be >= 0, got {}", self.nbar)));
        }
        if self.mbar < 0.0 {
            return Err(Error::Domain(format!("mbar must be >= 0, got {}", self.mbar)));
        }
        Ok(())
    }

    /// `N = 2n̄ + 1`.
    pub fn big_n(&self) -> f64 {
        2.0 * self.nbar + 1.0
    }

    /// `M = m̄ + ½`, the variance of the initial thermal state.
    pub fn big_m(&self) -> f64 {
        self.mbar + 0.5
    }

    /// `γ₊ = κ N`.
    pub fn gamma_plus(&self) -> f64 {
        self.kappa * self.big_n()
    }

    /// Centred thermal state with `σ₀ = M·𝟙`.
    pub fn thermal_init(&self) -> GaussianState {
        GaussianState::thermal(self.mbar).expect("validated mbar gives a valid thermal state")
    }
}

/// Bose–Einstein occupation `n̄ = 1/(e^{1/D} − 1)` for dimensionless temperature `D`.
pub fn occupation_from_temperature(temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::Domain(format!(
            "temperature must be positive and finite, got {temperature}"
        )));
    }
    Ok(1.0 / (1.0 / temperature).exp_m1())
}

/// Symmetric 2×2 covariance matrix of an oscillator state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covariance2 {
    xx: f64,
    xp: f64,
    pp: f64,
}

impl Covariance2 {
    /// Builds a covariance and checks positivity and the uncertainty bound.
    pub fn new(xx: f64, xp: f64, pp: f64) -> Result<Self> {
        if !(xx.is_finite() && xp.is_finite() && pp.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite entry".into()));
        }
        let c = Self { xx, xp, pp };
        if xx <= 0.0 || pp <= 0.0 || c.det() <= 0.0 {
            return Err(Error::InvalidCovariance(format!(
                "not positive definite: ({xx}, {xp}, {pp})"
            )));
        }
        if c.det() < 0.25 - PURITY_SLACK {
            return Err(Error::InvalidCovariance(format!(
                "det = {} violates the uncertainty bound det >= 1/4",
                c.det()
            )));
        }
        Ok(c)
    }

    /// `v·𝟙`, valid for `v ≥ ½`.
    pub fn isotropic(v: f64) -> Result<Self> {
        Self::new(v, 0.0, v)
    }

    /// Skips the uncertainty check; used for sums of covariances.
    pub(crate) fn from_matrix_unchecked(m: &Mat2) -> Self {
        Self {
            xx: m[(0, 0)],
            xp: 0.5 * (m[(0, 1)] + m[(1, 0)]),
            pp: m[(1, 1)],
        }
    }

    pub fn xx(&self) -> f64 {
        self.xx
    }

    pub fn xp(&self) -> f64 {
        self.xp
    }

    pub fn pp(&self) -> f64 {
        self.pp
    }

    pub fn det(&self) -> f64 {
        self.xx * self.pp - self.xp * self.xp
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.xx, self.xp, self.xp, self.pp)
    }

    /// `rᵀ σ r`.
    pub fn quad(&self, r: &PhaseVector) -> f64 {
        self.xx * r[0] * r[0] + 2.0 * self.xp * r[0] * r[1] + self.pp * r[1] * r[1]
    }

    /// `rᵀ σ⁻¹ r`.
    pub fn inv_quad(&self, r: &PhaseVector) -> f64 {
        (self.pp * r[0] * r[0] - 2.0 * self.xp * r[0] * r[1] + self.xx * r[1] * r[1]) / self.det()
    }
}

/// Gaussian oscillator state: centre `x₀ = (⟨x⟩, ⟨p⟩)` and covariance `σ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub center: PhaseVector,
    pub cov: Covariance2,
}

impl GaussianState {
    pub fn new(center: PhaseVector, cov: Covariance2) -> Result<Self> {
        if !(center[0].is_finite() && center[1].is_finite()) {
            return Err(Error::Domain("state centre must be finite".into()));
        }
        Ok(Self { center, cov })
    }

    /// Centred thermal state with mean occupation `m̄`.
    pub fn thermal(mbar: f64) -> Result<Self> {
        if !(mbar >= 0.0) {
            return Err(Error::Domain(format!("mbar must be >= 0, got {mbar}")));
        }
        Self::new(PhaseVector::zeros(), Covariance2::isotropic(mbar + 0.5)?)
    }

    /// Coherent state (displaced vacuum) centred at `(x0, p0)`.
    pub fn coherent(x0: f64, p0: f64) -> Result<Self> {
        Self::new(PhaseVector::new(x0, p0), Covariance2::isotropic(0.5)?)
    }

    /// Chord function `exp(i x₀·r − ½ rᵀσ₀r)`.
    pub fn chord(&self, r: &PhaseVector) -> Complex64 {
        let phase = self.center.dot(r);
        let amp = (-0.5 * self.cov.quad(r)).exp();
        Complex64::from_polar(amp, phase)
    }

    /// Normalised Wigner density.
    pub fn wigner(&self, x: &PhaseVector) -> f64 {
        let dx = x - self.center;
        let norm = 1.0 / (2.0 * PI * self.cov.det().sqrt());
        norm * (-0.5 * self.cov.inv_quad(&dx)).exp()
    }

    /// `Tr ρ² = 1/(2√det σ)`.
    pub fn purity(&self) -> f64 {
        0.5 / self.cov.det().sqrt()
    }
}

/// Free-function form of [`GaussianState::chord`].
pub fn chord_eval(state: &GaussianState, r: &PhaseVector) -> Complex64 {
    state.chord(r)
}

/// Free-function form of [`GaussianState::wigner`].
pub fn wigner_eval(state: &GaussianState, x: &PhaseVector) -> f64 {
    state.wigner(x)
}

/// First and second moments recovered from a chord function by central
/// differences at the origin with step `h`.
///
/// Returns `(⟨x⟩, ⟨p⟩, covariance)`. Truncation error is `O(h²)`.
pub fn moments_from_chord<F>(chord: F, h: f64) -> (f64, f64, Mat2)
where
    F: Fn(&PhaseVector) -> Complex64,
{
    let w = |k: f64, s: f64| chord(&PhaseVector::new(k, s));
    let w0 = w(0.0, 0.0);
    // ⟨x⟩ = −i ∂_k w, ⟨x²⟩ = −∂²_k w, symmetrised ⟨xp⟩ = −∂_k∂_s w
    let dk = (w(h, 0.0) - w(-h, 0.0)) / (2.0 * h);
    let ds = (w(0.0, h) - w(0.0, -h)) / (2.0 * h);
    let dkk = (w(h, 0.0) - 2.0 * w0 + w(-h, 0.0)) / (h * h);
    let dss = (w(0.0, h) - 2.0 * w0 + w(0.0, -h)) / (h * h);
    let dks = (w(h, h) - w(h, -h) - w(-h, h) + w(-h, -h)) / (4.0 * h * h);
    let i = Complex64::i();
    let mx = (-i * dk).re;
    let mp = (-i * ds).re;
    let xx = -dkk.re - mx * mx;
    let pp = -dss.re - mp * mp;
    let xp = -dks.re - mx * mp;
    (mx, mp, Mat2::new(xx, xp, xp, pp))
}

/// Initial qubit density matrix `[[a₀₀, a₀₁], [a₀₁*, a₁₁]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitInitState {
    a00: f64,
    a11: f64,
    a01: Complex64,
}

impl QubitInitState {
    pub fn new(a00: f64, a11: f64, a01: Complex64) -> Result<Self> {
        const TOL: f64 = 1e-12;
        if !(a00 >= 0.0 && a11 >= 0.0) {
            return Err(Error::InvalidQubit(format!("negative population ({a00}, {a11})")));
        }
        if (a00 + a11 - 1.0).abs() > TOL {
            return Err(Error::InvalidQubit(format!("populations sum to {}", a00 + a11)));
        }
        if a01.norm_sqr() > a00 * a11 + TOL {
            return Err(Error::InvalidQubit(format!(
                "|a01|^2 = {} exceeds a00*a11 = {}",
                a01.norm_sqr(),
                a00 * a11
            )));
        }
        Ok(Self { a00, a11, a01 })
    }

    /// `(|0⟩ + |1⟩)/√2`, all entries ½.
    pub fn plus() -> Self {
        Self {
            a00: 0.5,
            a11: 0.5,
            a01: Complex64::new(0.5, 0.0),
        }
    }

    pub fn a00(&self) -> f64 {
        self.a00
    }

    pub fn a11(&self) -> f64 {
        self.a11
    }

    pub fn a01(&self) -> Complex64 {
        self.a01
    }
}

impl Default for QubitInitState {
    fn default() -> Self {
        Self::plus()
    }
}
