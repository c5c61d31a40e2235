//! Truncated number-basis operators and the block master-equation generator.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase_space::SystemParams;

type C = Complex64;

/// Ladder and quadrature operators in the first `dim` number states.
#[derive(Debug, Clone)]
pub struct Operators {
    pub dim: usize,
    /// Lowering operator, `⟨n−1|a|n⟩ = √n`.
    pub a: DMatrix<C>,
    pub adag: DMatrix<C>,
    /// `(a + a†)/√2`.
    pub x: DMatrix<C>,
    /// `i(a† − a)/√2`.
    pub p: DMatrix<C>,
    /// `a†a + ½`.
    pub h_osc: DMatrix<C>,
}

impl Operators {
    /// `H± = H_osc ± g x`.
    pub fn h_pm(&self, g: f64, sign: f64) -> DMatrix<C> {
        &self.h_osc + &self.x * C::new(sign * g, 0.0)
    }

    pub fn number(&self) -> DMatrix<C> {
        &self.adag * &self.a
    }
}

pub fn build_operators(dim: usize) -> Result<Operators> {
    if dim < 2 {
        return Err(Error::Config(format!("truncation dimension must be >= 2, got {dim}")));
    }
    let mut a = DMatrix::<C>::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C::new((n as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&a + &adag) * C::new(s, 0.0);
    let p = (&adag - &a) * C::new(0.0, s);
    let h_osc = DMatrix::from_fn(dim, dim, |i, j| if i == j { C::new(i as f64 + 0.5, 0.0) } else { C::new(0.0, 0.0) });
    Ok(Operators { dim, a, adag, x, p, h_osc })
}

/// Matrix-free action of one block generator on a row-major `dim × dim` matrix:
///
/// `ρ̇ = −i(H_L ρ − ρ H_R) − iΔ_q ρ + 2κ(1+n̄)(aρa† − ½{a†a, ρ}) + 2κn̄(a†ρa − ½{aa†, ρ})`
///
/// with `H_L = H_osc + g_L x`, `H_R = H_osc + g_R x`. The diagonal blocks use
/// `g_L = g_R = ±g`, `Δ_q = 0`; the coherence block uses `g_L = g`,
/// `g_R = −g`, `Δ_q = Δ`, which follows from `H = Δσ_z/2 + H_osc + gσ_z x`.
#[derive(Debug, Clone)]
pub struct BlockGenerator {
    pub dim: usize,
    pub g_left: f64,
    pub g_right: f64,
    pub qubit_phase: f64,
    pub down: f64,
    pub up: f64,
    sqrt: Vec<f64>,
}

impl BlockGenerator {
    pub fn new(dim: usize, params: &SystemParams, g_left: f64, g_right: f64, qubit_phase: f64) -> Self {
        Self {
            dim,
            g_left,
            g_right,
            qubit_phase,
            down: params.kappa * (1.0 + params.nbar),
            up: params.kappa * params.nbar,
            sqrt: (0..=dim).map(|n| (n as f64).sqrt()).collect(),
        }
    }

    /// Lab-frame generator.
    pub fn apply(&self, rho: &[C], out: &mut [C]) {
        self.act(rho, out, C::new(1.0, 0.0), true);
    }

    /// Generator for `ρ̃_ij = ρ_ij e^{iω_ij t}` with `ω_ij = i − j + Δ_q`, the
    /// frame co-rotating with the free oscillator and qubit phase. The
    /// dissipator is unchanged by the rotation and the coupling picks up
    /// `e^{∓it}` on the ladder steps, so no fast phases remain.
    pub fn apply_rotating(&self, t: f64, rho: &[C], out: &mut [C]) {
        self.act(rho, out, C::from_polar(1.0, -t), false);
    }

    /// `ω_ij` of the rotating frame.
    pub fn frequency(&self, i: usize, j: usize) -> f64 {
        i as f64 - j as f64 + self.qubit_phase
    }

    /// Maps a rotating-frame matrix back to the lab frame at time `t`.
    pub fn to_lab(&self, t: f64, rho: &mut [C]) {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                rho[i * d + j] *= C::from_polar(1.0, -self.frequency(i, j) * t);
            }
        }
    }

    fn act(&self, rho: &[C], out: &mut [C], ph: C, free: bool) {
        let d = self.dim;
        let sq = &self.sqrt;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phc = ph.conj();
        // aa† in the truncated space: n + 1 below the top level, 0 at the top
        let aadag = |n: usize| if n + 1 < d { (n + 1) as f64 } else { 0.0 };
        for i in 0..d {
            for j in 0..d {
                let v = rho[i * d + j];
                let mut xrho = C::new(0.0, 0.0);
                let mut rhox = C::new(0.0, 0.0);
                if i + 1 < d {
                    xrho += rho[(i + 1) * d + j] * ph * sq[i + 1];
                }
                if i > 0 {
                    xrho += rho[(i - 1) * d + j] * phc * sq[i];
                }
                if j + 1 < d {
                    rhox += rho[i * d + j + 1] * phc * sq[j + 1];
                }
                if j > 0 {
                    rhox += rho[i * d + j - 1] * ph * sq[j];
                }
                let mut h = (xrho * self.g_left - rhox * self.g_right) * s;
                if free {
                    h += v * self.frequency(i, j);
                }
                let mut acc = C::new(h.im, -h.re);

                let mut jump_down = -v * ((i + j) as f64);
                if i + 1 < d && j + 1 < d {
                    jump_down += rho[(i + 1) * d + j + 1] * (2.0 * sq[i + 1] * sq[j + 1]);
                }
                let mut jump_up = -v * (aadag(i) + aadag(j));
                if i > 0 && j > 0 {
                    jump_up += rho[(i - 1) * d + j - 1] * (2.0 * sq[i] * sq[j]);
                }
                acc += jump_down * self.down + jump_up * self.up;
                out[i * d + j] = acc;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_lowering_operator() {
        let ops = build_operators(2).unwrap();
        assert_eq!(ops.a[(0, 1)], C::new(1.0, 0.0));
        assert_eq!(ops.a[(0, 0)], C::new(0.0, 0.0));
        assert_eq!(ops.a[(1, 0)], C::new(0.0, 0.0));
        assert_eq!(ops.a[(1, 1)], C::new(0.0, 0.0));
        assert!(build_operators(1).is_err());
    }

    #[test]
    fn ground_state_position_variance() {
        let ops = build_operators(8).unwrap();
        let x2 = &ops.x * &ops.x;
        assert!((x2[(0, 0)].re - 0.5).abs() < 1e-15);
        let p2 = &ops.p * &ops.p;
        assert!((p2[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn canonical_commutator_below_top_level() {
        let d = 10;
        let ops = build_operators(d).unwrap();
        let comm = &ops.a * &ops.adag - &ops.adag * &ops.a;
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j && i < d - 1 { 1.0 } else if i == j { -((d - 1) as f64) } else { 0.0 };
                assert!((comm[(i, j)] - C::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn generator_matches_dense_construction() {
        let d = 7;
        let params = SystemParams::new(0.3, 0.15, 0.4, 0.7, 0.0).unwrap();
        let ops = build_operators(d).unwrap();
        let gen = BlockGenerator::new(d, &params, 0.3, -0.3, 0.4);
        let rho = DMatrix::<C>::from_fn(d, d, |i, j| C::new((i * 3 + j) as f64 * 0.1, (i as f64 - 2.0 * j as f64) * 0.05));
        let flat: Vec<C> = (0..d * d).map(|k| rho[(k / d, k % d)]).collect();
        let mut out = vec![C::new(0.0, 0.0); d * d];
        gen.apply(&flat, &mut out);

        let i = C::new(0.0, 1.0);
        let hl = ops.h_pm(0.3, 1.0);
        let hr = ops.h_pm(0.3, -1.0);
        let n = ops.number();
        let aad = &ops.a * &ops.adag;
        let k_down = C::new(params.kappa * (1.0 + params.nbar), 0.0);
        let k_up = C::new(params.kappa * params.nbar, 0.0);
        let two = C::new(2.0, 0.0);
        let expect = -(&hl * &rho - &rho * &hr) * i - &rho * (i * 0.4)
            + (&ops.a * &rho * &ops.adag * two - &n * &rho - &rho * &n) * k_down
            + (&ops.adag * &rho * &ops.a * two - &aad * &rho - &rho * &aad) * k_up;
        for k in 0..d * d {
            assert!((out[k] - expect[(k / d, k % d)]).norm() < 1e-12, "entry {k}");
        }
    }

    #[test]
    fn rotating_generator_matches_lab_frame() {
        let d = 6;
        let t = 0.7;
        let params = SystemParams::new(0.25, 0.1, 0.3, 0.4, 0.0).unwrap();
        let gen = BlockGenerator::new(d, &params, 0.25, -0.25, 0.3);
        let tilde: Vec<C> = (0..d * d).map(|k| C::new(0.1 * k as f64, 0.03 * (k % 5) as f64)).collect();
        let mut lab = tilde.clone();
        gen.to_lab(t, &mut lab);

        let mut lab_rate = vec![C::new(0.0, 0.0); d * d];
        gen.apply(&lab, &mut lab_rate);
        let mut rot_rate = vec![C::new(0.0, 0.0); d * d];
        gen.apply_rotating(t, &tilde, &mut rot_rate);
        gen.to_lab(t, &mut rot_rate);
        for i in 0..d {
            for j in 0..d {
                let k = i * d + j;
                let expect = rot_rate[k] - C::new(0.0, gen.frequency(i, j)) * lab[k];
                assert!((lab_rate[k] - expect).norm() < 1e-12, "entry ({i},{j})");
            }
        }
    }
}
