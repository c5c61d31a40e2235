//! Quantities read off truncated density matrices: chord values, Uhlmann
//! fidelity, purity, moments and Wigner grids.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::block::{BlockDensityMatrix, BlockSet};
use super::operators::build_operators;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, PhaseGrid};
use crate::phase_space::{Mat2, PhaseVector, QubitInitState};

type C = Complex64;

/// Eigenvalues below this are treated as rounding noise and clamped to zero.
pub const EIGEN_CLAMP: f64 = -1e-10;

/// Precomputed spectral data for `exp(i(k x + s p))` in the first `dim` levels.
///
/// `k x + s p = |r| U x U†` with `U = e^{iθ a†a}`, `θ = atan2(s, k)`, so one
/// eigendecomposition of the position operator serves every chord vector. The
/// position operator is diagonalised in a padded basis so that the restricted
/// exponential is accurate for the low levels.
#[derive(Debug, Clone)]
pub struct ChordTable {
    dim: usize,
    /// First `dim` rows of the eigenvectors of the padded `x`.
    vecs: DMatrix<f64>,
    vals: DVector<f64>,
}

impl ChordTable {
    pub fn new(dim: usize) -> Self {
        let padded = 2 * dim + 40;
        let mut x = DMatrix::<f64>::zeros(padded, padded);
        for n in 1..padded {
            let v = (n as f64 / 2.0).sqrt();
            x[(n - 1, n)] = v;
            x[(n, n - 1)] = v;
        }
        let eig = SymmetricEigen::new(x);
        Self {
            dim,
            vecs: eig.eigenvectors.rows(0, dim).into_owned(),
            vals: eig.eigenvalues,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `exp(i(k x + s p))` restricted to `dim × dim`.
    pub fn operator(&self, r: &PhaseVector) -> DMatrix<C> {
        let norm = r.norm();
        let theta = r[1].atan2(r[0]);
        let phases: Vec<C> = self.vals.iter().map(|&l| C::from_polar(1.0, norm * l)).collect();
        let d = self.dim;
        DMatrix::from_fn(d, d, |i, j| {
            let mut acc = C::new(0.0, 0.0);
            for (m, ph) in phases.iter().enumerate() {
                acc += ph * (self.vecs[(i, m)] * self.vecs[(j, m)]);
            }
            acc * C::from_polar(1.0, theta * (i as f64 - j as f64))
        })
    }

    /// `Tr[ρ exp(i(k x + s p))]`.
    pub fn chord(&self, rho: &DMatrix<C>, r: &PhaseVector) -> C {
        let e = self.operator(r);
        let d = self.dim;
        let mut acc = C::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += rho[(i, j)] * e[(j, i)];
            }
        }
        acc
    }
}

/// `Tr[ρ exp(i(k x + s p))]` for a single evaluation.
pub fn chord_from_matrix(rho: &BlockDensityMatrix, r: &PhaseVector) -> C {
    ChordTable::new(rho.dim()).chord(&rho.entries, r)
}

fn clamp_spectrum(vals: &DVector<f64>) -> Result<Vec<f64>> {
    vals.iter()
        .map(|&l| {
            if l >= 0.0 {
                Ok(l)
            } else if l >= EIGEN_CLAMP {
                Ok(0.0)
            } else {
                Err(Error::NotPositive(l))
            }
        })
        .collect()
}

fn hermitian_part(m: &DMatrix<C>) -> DMatrix<C> {
    (m + m.adjoint()) * C::new(0.5, 0.0)
}

fn sqrt_psd(m: &DMatrix<C>) -> Result<DMatrix<C>> {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let vals = clamp_spectrum(&eig.eigenvalues)?;
    let v = &eig.eigenvectors;
    let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * vals[j].sqrt());
    Ok(&scaled * v.adjoint())
}

/// `(Tr √(√ρ₁ ρ₂ √ρ₁))²`, evaluated as the squared trace norm of `√ρ₁ √ρ₂`.
///
/// Summing singular values keeps rounding noise in near-null directions at
/// the `ε` level, where summing `√λ` of `√ρ₁ ρ₂ √ρ₁` would lift it to `√ε`.
pub fn uhlmann_fidelity(rho1: &DMatrix<C>, rho2: &DMatrix<C>) -> Result<f64> {
    if rho1.shape() != rho2.shape() {
        return Err(Error::Config("density matrices have different dimensions".into()));
    }
    let prod = sqrt_psd(rho1)? * sqrt_psd(rho2)?;
    let tr: f64 = prod.singular_values().iter().sum();
    Ok(tr * tr)
}

/// `Tr ρ²` for a Hermitian `ρ`.
pub fn purity(rho: &DMatrix<C>) -> f64 {
    rho.iter().map(|v| v.norm_sqr()).sum()
}

/// `(⟨x⟩, ⟨p⟩, covariance)` with the symmetrised second moments.
pub fn moments(rho: &DMatrix<C>) -> Result<(f64, f64, Mat2)> {
    let ops = build_operators(rho.nrows())?;
    let ev = |o: &DMatrix<C>| (rho * o).trace().re;
    let mx = ev(&ops.x);
    let mp = ev(&ops.p);
    let xx = ev(&(&ops.x * &ops.x)) - mx * mx;
    let pp = ev(&(&ops.p * &ops.p)) - mp * mp;
    let xp = 0.5 * ev(&(&ops.x * &ops.p + &ops.p * &ops.x)) - mx * mp;
    Ok((mx, mp, Mat2::new(xx, xp, xp, pp)))
}

/// Harmonic-oscillator eigenfunctions `ψ₀(q) … ψ_{dim−1}(q)`.
pub fn hermite_functions(q: f64, dim: usize, out: &mut [f64]) {
    out[0] = PI.powf(-0.25) * (-0.5 * q * q).exp();
    if dim > 1 {
        out[1] = std::f64::consts::SQRT_2 * q * out[0];
    }
    for n in 1..dim.saturating_sub(1) {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * q * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

/// Wigner function on a grid,
/// `W(q, p) = (1/2π) ∫ ⟨q + y/2|ρ|q − y/2⟩ e^{−ipy} dy`,
/// with the position representation built from Hermite functions and the
/// `y` integral done by the trapezoid rule with step `y_step`.
pub fn wigner_grid(rho: &DMatrix<C>, spec: GridSpec, y_step: f64) -> Result<PhaseGrid> {
    spec.validate()?;
    if !(y_step > 0.0) {
        return Err(Error::Config(format!("y_step must be positive, got {y_step}")));
    }
    let d = rho.nrows();
    let reach = (2.0 * d as f64 + 1.0).sqrt() + 6.0;
    let ny = (2.0 * reach / y_step).ceil() as i64;
    let ys: Vec<f64> = (-ny..=ny).map(|k| k as f64 * y_step).collect();
    let nq = spec.nq();
    let np = spec.np();

    let rows: Vec<Vec<f64>> = (0..nq)
        .into_par_iter()
        .map(|i| {
            let q = spec.q(i);
            let mut up = vec![0.0; d];
            let mut down = vec![0.0; d];
            let kernel: Vec<C> = ys
                .iter()
                .map(|&y| {
                    hermite_functions(q + 0.5 * y, d, &mut up);
                    hermite_functions(q - 0.5 * y, d, &mut down);
                    let mut acc = C::new(0.0, 0.0);
                    for m in 0..d {
                        if up[m] == 0.0 {
                            continue;
                        }
                        let mut row = C::new(0.0, 0.0);
                        for n in 0..d {
                            row += rho[(m, n)] * down[n];
                        }
                        acc += row * up[m];
                    }
                    acc
                })
                .collect();
            (0..np)
                .map(|j| {
                    let p = spec.p(j);
                    let s: C = ys.iter().zip(&kernel).map(|(&y, &f)| f * C::from_polar(1.0, -p * y)).sum();
                    s.re * y_step / (2.0 * PI)
                })
                .collect()
        })
        .collect();

    let mut values = vec![0.0; nq * np];
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            values[j * nq + i] = v;
        }
    }
    PhaseGrid::from_values(spec, values)
}

/// Reduced-state summaries assembled from the three blocks.
#[derive(Debug, Clone)]
pub struct ReducedQuantities {
    pub t: f64,
    pub purity_qubit: f64,
    pub purity_oscillator: f64,
    pub wigner: Option<PhaseGrid>,
}

/// Qubit and oscillator purities, and optionally the oscillator Wigner grid,
/// from one [`BlockSet`]. The blocks are normalised per qubit amplitude, so the
/// full state is `Σ a_ij |i⟩⟨j| ⊗ ρ_ij`.
pub fn reduced_quantities(blocks: &BlockSet, qubit: &QubitInitState, grid: Option<GridSpec>) -> Result<ReducedQuantities> {
    let (a, b) = (qubit.a00(), qubit.a11());
    let t00 = blocks.rho00.trace().re;
    let t11 = blocks.rho11.trace().re;
    let t01 = blocks.rho01.trace();
    let purity_qubit = a * a * t00 * t00 + b * b * t11 * t11 + 2.0 * qubit.a01().norm_sqr() * t01.norm_sqr();
    let osc = &blocks.rho00.entries * C::new(a, 0.0) + &blocks.rho11.entries * C::new(b, 0.0);
    let wigner = match grid {
        Some(spec) => Some(wigner_grid(&osc, spec, 0.1)?),
        None => None,
    };
    Ok(ReducedQuantities {
        t: blocks.t,
        purity_qubit,
        purity_oscillator: purity(&osc),
        wigner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::block::{initial_matrix, BlockKind};
    use crate::phase_space::GaussianState;

    fn vacuum(dim: usize) -> DMatrix<C> {
        let mut m = DMatrix::zeros(dim, dim);
        m[(0, 0)] = C::new(1.0, 0.0);
        m
    }

    #[test]
    fn vacuum_chord_values() {
        let table = ChordTable::new(20);
        let rho = vacuum(20);
        assert!((table.chord(&rho, &PhaseVector::zeros()) - C::new(1.0, 0.0)).norm() < 1e-13);
        let w = table.chord(&rho, &PhaseVector::new(1.0, 0.0));
        assert!((w - C::new((-0.25f64).exp(), 0.0)).norm() < 1e-12);
        assert!((w.re - 0.7788008).abs() < 1e-7);
    }

    #[test]
    fn thermal_chord_matches_gaussian() {
        let dim = 40;
        let state = GaussianState::thermal(1.0).unwrap();
        let rho = initial_matrix(BlockKind::B00, dim, &state).unwrap();
        let r = PhaseVector::new(0.5, 0.5);
        let w = chord_from_matrix(&rho, &r);
        assert!((w - state.chord(&r)).norm() < 1e-6);
        assert!((w.re - 0.6872893).abs() < 1e-6);
    }

    #[test]
    fn displaced_vacuum_chord_and_moments() {
        let dim = 40;
        let state = GaussianState::coherent(1.0, -0.4).unwrap();
        let rho = initial_matrix(BlockKind::B00, dim, &state).unwrap();
        for r in [PhaseVector::new(1.0, 0.0), PhaseVector::new(0.0, 1.0), PhaseVector::new(-0.3, 0.8)] {
            assert!((chord_from_matrix(&rho, &r) - state.chord(&r)).norm() < 1e-10);
        }
        let (mx, mp, cov) = moments(&rho.entries).unwrap();
        assert!((mx - 1.0).abs() < 1e-10 && (mp + 0.4).abs() < 1e-10);
        assert!((cov - Mat2::identity() * 0.5).norm() < 1e-10);
    }

    #[test]
    fn uhlmann_basic_cases() {
        let dim = 30;
        let a = vacuum(dim);
        assert!((uhlmann_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let mut b = DMatrix::zeros(dim, dim);
        b[(1, 1)] = C::new(1.0, 0.0);
        assert!(uhlmann_fidelity(&a, &b).unwrap().abs() < 1e-12);
        let mut bad = vacuum(dim);
        bad[(1, 1)] = C::new(-1e-3, 0.0);
        assert!(matches!(uhlmann_fidelity(&bad, &a), Err(Error::NotPositive(_))));
    }

    #[test]
    fn uhlmann_displaced_vacua() {
        let dim = 40;
        let beta = 0.6;
        let s1 = GaussianState::coherent(beta, 0.0).unwrap();
        let s2 = GaussianState::coherent(-beta, 0.0).unwrap();
        let r1 = initial_matrix(BlockKind::B00, dim, &s1).unwrap();
        let r2 = initial_matrix(BlockKind::B00, dim, &s2).unwrap();
        let f = uhlmann_fidelity(&r1.entries, &r2.entries).unwrap();
        let d2 = (2.0 * beta) * (2.0 * beta);
        assert!((f - (-d2 / 2.0).exp()).abs() < 1e-9);
        assert!((f - crate::fidelity::fidelity_uj_gaussian(&s1, &s2)).abs() < 1e-9);
        let g = uhlmann_fidelity(&r2.entries, &r1.entries).unwrap();
        assert!((f - g).abs() < 1e-10);
    }

    #[test]
    fn wigner_of_thermal_state() {
        let dim = 40;
        let state = GaussianState::thermal(0.5).unwrap();
        let rho = initial_matrix(BlockKind::B00, dim, &state).unwrap();
        let spec = GridSpec::square(2.0, 0.5);
        let grid = wigner_grid(&rho.entries, spec, 0.1).unwrap();
        for j in 0..spec.np() {
            for i in 0..spec.nq() {
                let x = PhaseVector::new(spec.q(i), spec.p(j));
                assert!((grid.at(i, j) - state.wigner(&x)).abs() < 1e-9, "({i},{j})");
            }
        }
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let dim = 12;
        let h = 0.01;
        let mut gram = DMatrix::<f64>::zeros(dim, dim);
        let mut buf = vec![0.0; dim];
        let mut q = -12.0;
        while q <= 12.0 {
            hermite_functions(q, dim, &mut buf);
            for m in 0..dim {
                for n in 0..dim {
                    gram[(m, n)] += buf[m] * buf[n] * h;
                }
            }
            q += h;
        }
        assert!((gram - DMatrix::identity(dim, dim)).amax() < 1e-9);
    }
}
