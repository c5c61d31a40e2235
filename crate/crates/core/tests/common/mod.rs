#![allow(dead_code)]

use qubit_probe::phase_space::{Mat2, PhaseVector};

/// Integral over `[a, b]` split into unit panels, each by double-exponential quadrature.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let panels = ((b - a).ceil() as usize).max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + k as f64 * h;
            quadrature::integrate(&f, lo, lo + h, 1e-14).integral
        })
        .sum()
}

/// `R(−τ) = e^{−κτ}[[cos τ, −sin τ], [sin τ, cos τ]]`, written out directly.
pub fn r_back(tau: f64, kappa: f64) -> Mat2 {
    let e = (-kappa * tau).exp();
    Mat2::new(e * tau.cos(), -e * tau.sin(), e * tau.sin(), e * tau.cos())
}

/// `d(t) = 2g ∫₀ᵗ (R₂₁(−τ), R₂₂(−τ)) dτ` by quadrature.
pub fn d_quad(t: f64, g: f64, kappa: f64) -> PhaseVector {
    let d1 = integrate(|u| r_back(u, kappa)[(1, 0)], 0.0, t);
    let d2 = integrate(|u| r_back(u, kappa)[(1, 1)], 0.0, t);
    2.0 * g * PhaseVector::new(d1, d2)
}

/// `δ(t) = ∫₀ᵗ |d(u)|² du` with `d` itself from quadrature.
pub fn delta_quad(t: f64, g: f64, kappa: f64) -> f64 {
    integrate(|u| d_quad(u, g, kappa).norm_squared(), 0.0, t)
}

/// `Γ(t) = 2∫₀ᵗ Rᵀ(−τ) η(τ) dτ` with `η = −(d₂, d₁)` from quadrature.
pub fn gamma_quad(t: f64, g: f64, kappa: f64) -> PhaseVector {
    let comp = |i: usize| {
        integrate(
            |u| {
                let d = d_quad(u, g, kappa);
                let eta = PhaseVector::new(-d[1], -d[0]);
                (r_back(u, kappa).transpose() * eta)[i]
            },
            0.0,
            t,
        )
    };
    2.0 * PhaseVector::new(comp(0), comp(1))
}

/// `α(t) = 2κ(n̄ + ½)∫₀ᵗ e^{−2κu} du`.
pub fn alpha_quad(t: f64, kappa: f64, nbar: f64) -> f64 {
    2.0 * kappa * (nbar + 0.5) * integrate(|u| (-2.0 * kappa * u).exp(), 0.0, t)
}

pub fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}
