//! Closed-form propagator for the three qubit blocks of the oscillator state.
//!
//! The chord functions of `ρ₀₀`, `ρ₁₁` (diagonal qubit blocks, evolving under
//! `H± = H_osc ± g x` plus dissipation) and `ρ₀₁` (coherence block) are
//! transported along the characteristics of a damped rotation. Everything is
//! expressed through a handful of time-dependent kernels:
//!
//! * `R(t) = e^{κt}·rot(t)`, the fundamental matrix of the characteristics,
//! * `d(t) = 2g ∫₀ᵗ (R₂₁(−τ), R₂₂(−τ)) dτ`, the separation of the two
//!   conditional Gaussians,
//! * `α(t) = (n̄ + ½)(1 − e^{−2κt})`, the diffusion added by the bath,
//! * `η(t) = −(d₂, d₁)`, the chord-space shift of the coherence block,
//! * `δ(t) = ∫₀ᵗ |d|²`, the accumulated decoherence exponent,
//! * `Γ(t) = 2∫₀ᵗ Rᵀ(−τ) η(τ) dτ`.
//!
//! All integrals are evaluated in closed form from the two damped
//! trigonometric integrals `C(t) = ∫₀ᵗ e^{−κu} cos u du` and
//! `S(t) = ∫₀ᵗ e^{−κu} sin u du`, plus `E(t) = ∫₀ᵗ e^{−2κu} du`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{Covariance2, GaussianState, Mat2, PhaseVector, QubitInitState, SystemParams};

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite and >= 0, got {t}")))
    }
}

/// `R(t) = e^{κt} [[cos t, sin t], [−sin t, cos t]]`; any real `t`.
pub fn fundamental_matrix(t: f64, kappa: f64) -> Mat2 {
    let (s, c) = t.sin_cos();
    (kappa * t).exp() * Mat2::new(c, s, -s, c)
}

/// `(1 − e^{−z})/z`, equal to 1 at `z = 0`.
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - 0.5 * z
    } else {
        -(-z).exp_m1() / z
    }
}

/// `E(t) = ∫₀ᵗ e^{−2κu} du`.
pub(crate) fn exp2_integral(kappa: f64, t: f64) -> f64 {
    t * phi1(2.0 * kappa * t)
}

/// `(C(t), S(t))`, the damped cosine and sine integrals.
pub(crate) fn damped_trig_integrals(kappa: f64, t: f64) -> (f64, f64) {
    let e = (-kappa * t).exp();
    let (s, c) = t.sin_cos();
    let den = 1.0 + kappa * kappa;
    let ci = (kappa - e * (kappa * c - s)) / den;
    let si = (1.0 - e * (kappa * s + c)) / den;
    (ci, si)
}

/// `d(t) = (2g S(t), 2g C(t))`.
pub fn displacement_vector(t: f64, params: &SystemParams) -> PhaseVector {
    let (ci, si) = damped_trig_integrals(params.kappa, t);
    PhaseVector::new(2.0 * params.g * si, 2.0 * params.g * ci)
}

/// `η(t) = 2g/(1+κ²) · (R(−t) − 𝟙)(κ, 1)ᵀ`.
pub fn eta_vector(t: f64, params: &SystemParams) -> PhaseVector {
    let k = params.kappa;
    let kv = PhaseVector::new(k, 1.0);
    let m = fundamental_matrix(-t, k) - Mat2::identity();
    (2.0 * params.g / (1.0 + k * k)) * (m * kv)
}

/// `|d(t)|² = 4g²/(1+κ²) · (e^{−2κt} − 2e^{−κt} cos t + 1)`.
///
/// Evaluated as `(1 − e^{−κt})² + 4e^{−κt} sin²(t/2)` to stay accurate at small `t`.
pub fn d_squared(t: f64, g: f64, kappa: f64) -> f64 {
    let em = (-kappa * t).exp_m1();
    let half = (0.5 * t).sin();
    let shape = em * em + 4.0 * (-kappa * t).exp() * half * half;
    4.0 * g * g / (1.0 + kappa * kappa) * shape
}

/// Time derivative of [`d_squared`].
pub fn d_squared_rate(t: f64, g: f64, kappa: f64) -> f64 {
    let e = (-kappa * t).exp();
    let (s, c) = t.sin_cos();
    let shape = -2.0 * kappa * e * e + 2.0 * kappa * e * c + 2.0 * e * s;
    4.0 * g * g / (1.0 + kappa * kappa) * shape
}

/// `δ(t) = ∫₀ᵗ |d(u)|² du = 4g²/(1+κ²) · (t + E(t) − 2C(t))`.
pub fn delta_integral(t: f64, g: f64, kappa: f64) -> f64 {
    let (ci, _) = damped_trig_integrals(kappa, t);
    let shape = t + exp2_integral(kappa, t) - 2.0 * ci;
    4.0 * g * g / (1.0 + kappa * kappa) * shape.max(0.0)
}

/// `Γ(t) = 4g [E(t)·𝟙 − [[C, S], [−S, C]]] κ⃗` with `κ⃗ = (κ, 1)/(1+κ²)`.
pub fn gamma_vector(t: f64, params: &SystemParams) -> PhaseVector {
    let k = params.kappa;
    let (ci, si) = damped_trig_integrals(k, t);
    let e2 = exp2_integral(k, t);
    let kv = PhaseVector::new(k, 1.0) / (1.0 + k * k);
    let m = Mat2::new(e2 - ci, -si, si, e2 - ci);
    4.0 * params.g * (m * kv)
}

/// `α(t) = (n̄ + ½)(1 − e^{−2κt})`.
pub fn alpha(t: f64, params: &SystemParams) -> f64 {
    -(params.nbar + 0.5) * (-2.0 * params.kappa * t).exp_m1()
}

/// `σ(t) = α(t)·𝟙 + Rᵀ(−t) σ₀ R(−t)`.
pub fn evolved_covariance(t: f64, params: &SystemParams, sigma0: &Covariance2) -> Covariance2 {
    let r = fundamental_matrix(-t, params.kappa);
    let m = alpha(t, params) * Mat2::identity() + r.transpose() * sigma0.matrix() * r;
    Covariance2::from_matrix_unchecked(&m)
}

/// Which diagonal block: `ρ₀₀` evolves under `H₊`, `ρ₁₁` under `H₋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagBlock {
    Plus,
    Minus,
}

impl DiagBlock {
    fn sign(self) -> f64 {
        match self {
            DiagBlock::Plus => 1.0,
            DiagBlock::Minus => -1.0,
        }
    }
}

/// Every time-dependent kernel at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorKernel {
    pub t: f64,
    pub params: SystemParams,
    /// `R(t)`; note that the solutions use `R(−t)`, available via [`Self::r_back`].
    pub r: Mat2,
    pub d: PhaseVector,
    pub alpha: f64,
    pub eta: PhaseVector,
    pub delta: f64,
    pub gamma: PhaseVector,
    pub sigma: Covariance2,
}

/// All kernels at time `t` for initial covariance `sigma0`.
pub fn kernel_at(t: f64, params: &SystemParams, sigma0: &Covariance2) -> Result<PropagatorKernel> {
    check_time(t)?;
    Ok(PropagatorKernel {
        t,
        params: *params,
        r: fundamental_matrix(t, params.kappa),
        d: displacement_vector(t, params),
        alpha: alpha(t, params),
        eta: eta_vector(t, params),
        delta: delta_integral(t, params.g, params.kappa),
        gamma: gamma_vector(t, params),
        sigma: evolved_covariance(t, params, sigma0),
    })
}

impl PropagatorKernel {
    /// `R(−t)`.
    pub fn r_back(&self) -> Mat2 {
        fundamental_matrix(-self.t, self.params.kappa)
    }

    /// Chord function of `ρ₀₀` (`Plus`) or `ρ₁₁` (`Minus`).
    pub fn chord_diag(&self, r: &PhaseVector, init: &GaussianState, block: DiagBlock) -> Complex64 {
        let base = init.chord(&(self.r_back() * r));
        let phase = -0.5 * block.sign() * self.d.dot(r);
        let amp = -0.5 * self.alpha * r.norm_squared();
        base * Complex64::new(amp, phase).exp()
    }

    /// Chord function of the coherence block `ρ₀₁`.
    pub fn chord_offdiag(&self, r: &PhaseVector, init: &GaussianState) -> Complex64 {
        let gp = self.params.gamma_plus();
        let base = init.chord(&(self.r_back() * r + self.eta));
        let re = -0.5 * self.alpha * r.norm_squared() - 0.5 * gp * self.gamma.dot(r) - 0.5 * gp * self.delta;
        let im = -self.params.delta * self.t;
        base * Complex64::new(re, im).exp()
    }

    /// `Tr ρ₀₁(t)`, the chord function of the coherence block at the origin.
    pub fn coherence(&self, init: &GaussianState) -> Complex64 {
        self.chord_offdiag(&PhaseVector::zeros(), init)
    }

    /// Gaussian form of a diagonal block: centre `Rᵀ(−t)x₀ ∓ d/2`, covariance `σ(t)`.
    pub fn block_state(&self, init: &GaussianState, block: DiagBlock) -> GaussianState {
        let center = self.r_back().transpose() * init.center - 0.5 * block.sign() * self.d;
        GaussianState {
            center,
            cov: self.sigma,
        }
    }
}

/// Free-function form of [`PropagatorKernel::chord_diag`].
pub fn chord_block_diag(
    r: &PhaseVector,
    t: f64,
    params: &SystemParams,
    init: &GaussianState,
    block: DiagBlock,
) -> Result<Complex64> {
    Ok(kernel_at(t, params, &init.cov)?.chord_diag(r, init, block))
}

/// Free-function form of [`PropagatorKernel::chord_offdiag`].
pub fn chord_block_offdiag(r: &PhaseVector, t: f64, params: &SystemParams, init: &GaussianState) -> Result<Complex64> {
    Ok(kernel_at(t, params, &init.cov)?.chord_offdiag(r, init))
}

/// One sample of the qubit coherence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceSample {
    pub t: f64,
    pub value: Complex64,
}

/// `Tr ρ₀₁(t) = w_osc(η(t)) · exp(−iΔt − γ₊δ(t)/2)`.
pub fn coherence_trace(t: f64, params: &SystemParams, init: &GaussianState) -> Result<Complex64> {
    Ok(kernel_at(t, params, &init.cov)?.coherence(init))
}

/// Coherence over a grid of times.
pub fn coherence_series(times: &[f64], params: &SystemParams, init: &GaussianState) -> Result<Vec<CoherenceSample>> {
    times
        .iter()
        .map(|&t| {
            Ok(CoherenceSample {
                t,
                value: coherence_trace(t, params, init)?,
            })
        })
        .collect()
}

/// The two Gaussian components of the reduced oscillator state.
pub fn block_states(t: f64, params: &SystemParams, init: &GaussianState) -> Result<(GaussianState, GaussianState)> {
    let k = kernel_at(t, params, &init.cov)?;
    Ok((k.block_state(init, DiagBlock::Plus), k.block_state(init, DiagBlock::Minus)))
}

/// Wigner function of the reduced oscillator state, `a₀₀W₀₀ + a₁₁W₁₁`.
pub fn reduced_wigner(
    x: &PhaseVector,
    t: f64,
    params: &SystemParams,
    init: &GaussianState,
    qubit: &QubitInitState,
) -> Result<f64> {
    let (w00, w11) = block_states(t, params, init)?;
    Ok(qubit.a00() * w00.wigner(x) + qubit.a11() * w11.wigner(x))
}
