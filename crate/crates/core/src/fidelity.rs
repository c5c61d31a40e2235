//! Fidelity measures between the two conditional oscillator evolutions.
//!
//! The generalized fidelity is the squared modulus of the qubit coherence,
//! `F_gen = |Tr ρ₀₁|²`. The Uhlmann–Jozsa fidelity compares the two diagonal
//! blocks `ρ₀₀`, `ρ₁₁` as mixed states; both are Gaussian, so it reduces to a
//! closed form in their first and second moments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{GaussianState, QubitInitState, SystemParams, PURITY_SLACK};
use crate::propagator::{self, check_time, kernel_at, DiagBlock};

/// `F_gen(t) = exp(−ηᵀσ₀η − γ₊δ)`. Independent of the initial centre.
pub fn fidelity_generalized(t: f64, params: &SystemParams, init: &GaussianState) -> Result<f64> {
    let k = kernel_at(t, params, &init.cov)?;
    Ok((-init.cov.quad(&k.eta) - params.gamma_plus() * k.delta).exp())
}

/// Thermal initial state `σ₀ = M·𝟙`: `F_gen = exp(−M d² − γ₊δ)`.
pub fn fidelity_gen_thermal(t: f64, params: &SystemParams, m: f64) -> Result<f64> {
    check_time(t)?;
    let d2 = propagator::d_squared(t, params.g, params.kappa);
    let delta = propagator::delta_integral(t, params.g, params.kappa);
    Ok((-m * d2 - params.gamma_plus() * delta).exp())
}

/// Long-time slope of `−ln F_gen`: `4g²κ(2n̄+1)/(1+κ²)`; zero when `κ = 0`.
pub fn fidelity_gen_asymptotic_rate(params: &SystemParams) -> f64 {
    let k = params.kappa;
    4.0 * params.g * params.g * k * params.big_n() / (1.0 + k * k)
}

/// Uhlmann–Jozsa fidelity between two single-mode Gaussian states:
///
/// `F = exp(−½ Δxᵀ(σ₁+σ₂)⁻¹Δx) / (√(μ+4ν) − √(4ν))`
/// with `μ = det(σ₁+σ₂)` and `ν = (det σ₁ − ¼)(det σ₂ − ¼)`.
pub fn fidelity_uj_gaussian(a: &GaussianState, b: &GaussianState) -> f64 {
    let sum = a.cov.matrix() + b.cov.matrix();
    let mu = sum.determinant();
    let excess = |det: f64| {
        let e = det - 0.25;
        if (-PURITY_SLACK..0.0).contains(&e) {
            0.0
        } else {
            e
        }
    };
    let nu = (excess(a.cov.det()) * excess(b.cov.det())).max(0.0);
    let prefactor = (mu + 4.0 * nu).sqrt() - (4.0 * nu).sqrt();
    let dx = b.center - a.center;
    let inv_quad = (sum[(1, 1)] * dx[0] * dx[0] - 2.0 * sum[(0, 1)] * dx[0] * dx[1] + sum[(0, 0)] * dx[1] * dx[1]) / mu;
    (-0.5 * inv_quad).exp() / prefactor
}

/// Uhlmann–Jozsa fidelity between the analytic `ρ₀₀(t)` and `ρ₁₁(t)` for any
/// Gaussian initial state.
pub fn fidelity_uj_general(t: f64, params: &SystemParams, init: &GaussianState) -> Result<f64> {
    let k = kernel_at(t, params, &init.cov)?;
    Ok(fidelity_uj_gaussian(
        &k.block_state(init, DiagBlock::Plus),
        &k.block_state(init, DiagBlock::Minus),
    ))
}

/// Scalar covariance of the blocks for a thermal initial state:
/// `σ(t) = α(t) + M e^{−2κt} = (n̄+½) + (M − n̄ − ½) e^{−2κt}`.
pub fn thermal_block_variance(t: f64, params: &SystemParams, m: f64) -> f64 {
    propagator::alpha(t, params) + m * (-2.0 * params.kappa * t).exp()
}

/// Thermal initial state `σ₀ = M·𝟙`: `F_UJ = exp(−¼ d²(t)/σ(t))`.
pub fn fidelity_uj_blocks(t: f64, params: &SystemParams, m: f64) -> Result<f64> {
    check_time(t)?;
    let d2 = propagator::d_squared(t, params.g, params.kappa);
    Ok((-0.25 * d2 / thermal_block_variance(t, params, m)).exp())
}

/// `lim F_UJ = exp(−g²/((n̄+½)(1+κ²)))`, defined only for `κ > 0`.
pub fn fidelity_uj_long_time(params: &SystemParams) -> Option<f64> {
    (params.kappa > 0.0).then(|| {
        let k2 = params.kappa * params.kappa;
        (-params.g * params.g / ((params.nbar + 0.5) * (1.0 + k2))).exp()
    })
}

/// Purity of the reduced qubit: `a₀₀² + a₁₁² + 2|a₀₁|² F_gen`.
pub fn purity_qubit(t: f64, params: &SystemParams, m: f64, qubit: &QubitInitState) -> Result<f64> {
    let f = fidelity_gen_thermal(t, params, m)?;
    Ok(qubit.a00().powi(2) + qubit.a11().powi(2) + 2.0 * qubit.a01().norm_sqr() * f)
}

/// Purity of the reduced oscillator: `(a₀₀² + a₁₁² + 2a₀₀a₁₁F_UJ) / (2√det σ(t))`.
pub fn purity_oscillator(t: f64, params: &SystemParams, m: f64, qubit: &QubitInitState) -> Result<f64> {
    let f = fidelity_uj_blocks(t, params, m)?;
    let sigma = thermal_block_variance(t, params, m);
    let (a, b) = (qubit.a00(), qubit.a11());
    Ok((a * a + b * b + 2.0 * a * b * f) / (2.0 * sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityKind {
    Generalized,
    UhlmannJozsa,
}

/// A fidelity sampled on a time grid for a thermal initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub kind: FidelityKind,
    pub params: SystemParams,
    pub m: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl FidelityCurve {
    pub fn sample(kind: FidelityKind, params: &SystemParams, m: f64, times: &[f64]) -> Result<Self> {
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("time grid must be strictly increasing".into()));
        }
        let values = times
            .iter()
            .map(|&t| match kind {
                FidelityKind::Generalized => fidelity_gen_thermal(t, params, m),
                FidelityKind::UhlmannJozsa => fidelity_uj_blocks(t, params, m),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kind,
            params: *params,
            m,
            times: times.to_vec(),
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{Covariance2, PhaseVector};
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn generalized_examples() {
        let p = SystemParams::new(0.1, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(fidelity_gen_thermal(0.0, &p, 0.5).unwrap(), 1.0);
        let f = fidelity_gen_thermal(PI, &p, 0.5).unwrap();
        assert_relative_eq!(f, (-0.08f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(f, 0.9231163, epsilon = 1e-7);
        assert!(fidelity_gen_thermal(-0.1, &p, 0.5).is_err());
    }

    #[test]
    fn generalized_matches_coherence_modulus() {
        let p = SystemParams::new(0.17, 0.04, 0.9, 0.6, 0.3).unwrap();
        let init = GaussianState::new(PhaseVector::new(0.2, -0.4), Covariance2::new(0.9, 0.2, 0.7).unwrap()).unwrap();
        for &t in &[0.3, 2.0, 9.0] {
            let c = propagator::coherence_trace(t, &p, &init).unwrap();
            let f = fidelity_generalized(t, &p, &init).unwrap();
            assert_relative_eq!(c.norm_sqr(), f, epsilon = 1e-14);
        }
        // thermal specialisation agrees with the general form
        let th = p.thermal_init();
        assert_relative_eq!(
            fidelity_generalized(4.0, &p, &th).unwrap(),
            fidelity_gen_thermal(4.0, &p, p.big_m()).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn asymptotic_rate_examples() {
        let p = SystemParams::new(0.0, 0.1, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(fidelity_gen_asymptotic_rate(&p), 0.0);
        let p = SystemParams::new(0.2, 0.1, 0.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(fidelity_gen_asymptotic_rate(&p), 0.016 / 1.01, epsilon = 1e-15);
        assert_relative_eq!(fidelity_gen_asymptotic_rate(&p), 0.0158416, epsilon = 1e-7);
        let q = SystemParams::new(0.2, 0.1, 0.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(fidelity_gen_asymptotic_rate(&q), 3.0 * fidelity_gen_asymptotic_rate(&p), epsilon = 1e-15);
        let z = SystemParams::new(0.2, 0.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(fidelity_gen_asymptotic_rate(&z), 0.0);
    }

    #[test]
    fn asymptotic_rate_matches_slope() {
        let p = SystemParams::new(0.2, 0.1, 0.0, 0.0, 0.0).unwrap();
        let l = |t: f64| -fidelity_gen_thermal(t, &p, 0.5).unwrap().ln();
        let slope = (l(200.0) - l(100.0)) / 100.0;
        assert_relative_eq!(slope, fidelity_gen_asymptotic_rate(&p), epsilon = 1e-6);
    }

    #[test]
    fn uj_gaussian_examples() {
        let a = GaussianState::coherent(0.0, 0.0).unwrap();
        let b = GaussianState::coherent(1.0, 0.0).unwrap();
        assert_eq!(fidelity_uj_gaussian(&a, &a), 1.0);
        assert_relative_eq!(fidelity_uj_gaussian(&a, &b), (-0.5f64).exp(), epsilon = 1e-15);
        let th = GaussianState::thermal(1.7).unwrap();
        assert_relative_eq!(fidelity_uj_gaussian(&th, &th), 1.0, epsilon = 1e-12);
        let c = GaussianState::new(PhaseVector::new(0.3, 0.1), Covariance2::new(1.1, 0.3, 0.9).unwrap()).unwrap();
        assert_eq!(fidelity_uj_gaussian(&c, &th), fidelity_uj_gaussian(&th, &c));
    }

    #[test]
    fn uj_equal_covariance_prefactor_is_one() {
        for &(m, c) in &[(0.5, 0.0), (0.8, 0.3), (2.0, -0.5), (7.5, 1.0)] {
            let c = Covariance2::new(m, c, m).unwrap();
            let mu = 4.0 * c.det();
            let nu = (c.det() - 0.25).powi(2);
            let pre = (mu + 4.0 * nu).sqrt() - (4.0 * nu).sqrt();
            assert_relative_eq!(pre, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn uj_blocks_examples() {
        let p = SystemParams::new(0.2, 0.1, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(fidelity_uj_blocks(0.0, &p, 0.5).unwrap(), 1.0);
        let lim = fidelity_uj_long_time(&p).unwrap();
        assert_relative_eq!(lim, (-0.08f64 / 1.01).exp(), epsilon = 1e-15);
        assert_relative_eq!(fidelity_uj_blocks(300.0, &p, 0.5).unwrap(), lim, epsilon = 1e-12);
        assert!(fidelity_uj_blocks(-1.0, &p, 0.5).is_err());
        let z = SystemParams::new(0.2, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(fidelity_uj_long_time(&z).is_none());
    }

    #[test]
    fn uj_blocks_equals_isar_on_analytic_blocks() {
        let p = SystemParams::new(0.25, 0.08, 0.0, 0.7, 1.3).unwrap();
        let init = p.thermal_init();
        for &t in &[0.5, 3.0, 11.0] {
            assert_relative_eq!(
                fidelity_uj_blocks(t, &p, p.big_m()).unwrap(),
                fidelity_uj_general(t, &p, &init).unwrap(),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn purity_examples() {
        let p = SystemParams::new(0.1, 0.05, 0.0, 1.0, 0.0).unwrap();
        let q = QubitInitState::plus();
        assert_relative_eq!(purity_qubit(0.0, &p, 0.5, &q).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(purity_qubit(5000.0, &p, 0.5, &q).unwrap(), 0.5, epsilon = 1e-12);

        let ground = QubitInitState::new(1.0, 0.0, Complex64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(purity_oscillator(0.0, &p, 0.5, &ground).unwrap(), 1.0, epsilon = 1e-15);

        // g = 0: single Gaussian relaxing from M to n̄ + ½
        let free = SystemParams::new(0.0, 0.05, 0.0, 1.0, 1.0).unwrap();
        let t = 4.0;
        let sigma = 1.5 + (1.5 - 1.5) * (-0.4f64).exp();
        assert_relative_eq!(
            purity_oscillator(t, &free, 1.5, &ground).unwrap(),
            1.0 / (2.0 * sigma),
            epsilon = 1e-15
        );
        let free = SystemParams::new(0.0, 0.05, 0.0, 0.0, 2.0).unwrap();
        let sigma = 0.5 + (2.5 - 0.5) * (-0.4f64).exp();
        assert_relative_eq!(purity_oscillator(t, &free, 2.5, &q).unwrap(), 1.0 / (2.0 * sigma), epsilon = 1e-15);
    }

    #[test]
    fn curve_sampling() {
        let p = SystemParams::new(0.1, 0.05, 0.0, 0.5, 0.0).unwrap();
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.2).collect();
        let c = FidelityCurve::sample(FidelityKind::UhlmannJozsa, &p, 0.5, &times).unwrap();
        assert_eq!(c.values[0], 1.0);
        assert!(c.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!(FidelityCurve::sample(FidelityKind::Generalized, &p, 0.5, &[0.0, 0.0]).is_err());
    }
}
