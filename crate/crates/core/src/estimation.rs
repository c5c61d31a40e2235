//! Recovering coupling, damping and temperatures from decoherence records.
//!
//! For a thermal initial state the generalized fidelity is
//! `−ln F = M d²(t) + κN δ(t) = A(g, κ)·[M f(t, κ) + κN D(t, κ)]` with
//! `A = 4g²/(1+κ²)`, `f = 1 + e^{−2κt} − 2e^{−κt} cos t` and `D = ∫₀ᵗ f`.
//!
//! A single record fixes only `κ`, `g²M` and `g²N`: rescaling `g² → c g²`,
//! `M → M/c`, `N → N/c` leaves it unchanged. A direct fit therefore needs one
//! anchor, either the known `M` of the prepared state or a known bath `N`.
//! Two records prepared at different known `M` separate `d²` and the bath
//! term exactly.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::{d_squared, d_squared_rate, damped_trig_integrals, delta_integral, exp2_integral};

/// Minimum number of samples accepted by the fits.
pub const MIN_SAMPLES: usize = 40;
/// Minimum time span (two oscillator periods).
pub const MIN_SPAN: f64 = 4.0 * std::f64::consts::PI;

/// Sampled generalized fidelity for one prepared initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherenceSeries {
    pub times: Vec<f64>,
    pub fgen: Vec<f64>,
    /// Variance `M = m̄ + ½` of the initial thermal state, when known.
    pub m: Option<f64>,
    /// Relative noise level of the samples, if known.
    pub noise: Option<f64>,
}

impl CoherenceSeries {
    pub fn new(times: Vec<f64>, fgen: Vec<f64>, m: Option<f64>, noise: Option<f64>) -> Result<Self> {
        let s = Self { times, fgen, m, noise };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.fgen.len() {
            return Err(Error::Config(format!(
                "{} times but {} fidelity samples",
                self.times.len(),
                self.fgen.len()
            )));
        }
        if self.times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Domain("sample times must be finite and >= 0".into()));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("sample times must be strictly increasing".into()));
        }
        if let Some(bad) = self.fgen.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(Error::Domain(format!("fidelity samples must be positive, got {bad}")));
        }
        if let Some(m) = self.m {
            if !(m >= 0.5) {
                return Err(Error::Domain(format!("M must be >= 1/2, got {m}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn neg_log(&self) -> Vec<f64> {
        self.fgen.iter().map(|f| -f.ln()).collect()
    }

    fn require_fit_span(&self) -> Result<()> {
        let span = self.times.last().copied().unwrap_or(0.0) - self.times.first().copied().unwrap_or(0.0);
        if self.len() < MIN_SAMPLES || span < MIN_SPAN {
            return Err(Error::Config(format!(
                "fit needs >= {MIN_SAMPLES} samples over a span >= 4π; got {} samples over {span:.3}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// The four quantities the decoherence record depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermometryParams {
    pub g: f64,
    pub kappa: f64,
    /// Initial-state variance `M = m̄ + ½`.
    pub m: f64,
    /// Bath variance scale `N = 2n̄ + 1`.
    pub n: f64,
}

impl ThermometryParams {
    /// `−ln F_gen(t) = M d² + κN δ`.
    pub fn neg_log_fidelity(&self, t: f64) -> f64 {
        self.m * d_squared(t, self.g, self.kappa) + self.kappa * self.n * delta_integral(t, self.g, self.kappa)
    }

    pub fn fidelity(&self, t: f64) -> f64 {
        (-self.neg_log_fidelity(t)).exp()
    }
}

/// `H(t) = −d ln F_gen/dt = M (d²)′(t) + κN d²(t)`.
pub fn log_derivative_model(t: f64, g: f64, kappa: f64, m: f64, n: f64) -> f64 {
    m * d_squared_rate(t, g, kappa) + kappa * n * d_squared(t, g, kappa)
}

/// Noise-free record sampled at `times`, or with multiplicative Gaussian
/// noise `F·(1 + noise·ξ)` when `noise > 0`; draws with `1 + noise·ξ ≤ 0` are
/// redrawn so every sample stays positive.
pub fn synthetic_series<R: Rng + ?Sized>(truth: &ThermometryParams, times: &[f64], noise: f64, rng: &mut R) -> Result<CoherenceSeries> {
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::Domain(format!("noise level must be >= 0, got {noise}")));
    }
    let fgen = times
        .iter()
        .map(|&t| {
            let f = truth.fidelity(t);
            if noise == 0.0 {
                return f;
            }
            loop {
                let xi: f64 = StandardNormal.sample(rng);
                let factor = 1.0 + noise * xi;
                if factor > 0.0 {
                    return f * factor;
                }
            }
        })
        .collect();
    CoherenceSeries::new(times.to_vec(), fgen, Some(truth.m), (noise > 0.0).then_some(noise))
}

fn known_m(s: &CoherenceSeries) -> Result<f64> {
    s.m.ok_or_else(|| Error::Config("series has no known M".into()))
}

fn check_pair(s1: &CoherenceSeries, s2: &CoherenceSeries) -> Result<(f64, f64)> {
    s1.validate()?;
    s2.validate()?;
    let (m1, m2) = (known_m(s1)?, known_m(s2)?);
    if (m1 - m2).abs() <= 1e-12 * m1.max(m2) {
        return Err(Error::Degenerate(format!("both series were prepared with M = {m1}")));
    }
    if s1.len() != s2.len() {
        return Err(Error::Alignment(format!("{} vs {} samples", s1.len(), s2.len())));
    }
    if let Some((a, b)) = s1
        .times
        .iter()
        .zip(&s2.times)
        .find(|(a, b)| (*a - *b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return Err(Error::Alignment(format!("sample times {a} and {b} differ")));
    }
    Ok((m1, m2))
}

/// `d²(t) = (ln F⁽¹⁾ − ln F⁽²⁾)/(M₂ − M₁)` from two records at different `M`.
pub fn extract_d2(s1: &CoherenceSeries, s2: &CoherenceSeries) -> Result<Vec<f64>> {
    let (m1, m2) = check_pair(s1, s2)?;
    Ok(s1.fgen.iter().zip(&s2.fgen).map(|(a, b)| (a.ln() - b.ln()) / (m2 - m1)).collect())
}

/// Bath term `κN δ(t) = (M₂ ln F⁽¹⁾ − M₁ ln F⁽²⁾)/(M₁ − M₂)`.
pub fn extract_bath_term(s1: &CoherenceSeries, s2: &CoherenceSeries) -> Result<Vec<f64>> {
    let (m1, m2) = check_pair(s1, s2)?;
    Ok(s1
        .fgen
        .iter()
        .zip(&s2.fgen)
        .map(|(a, b)| (m2 * a.ln() - m1 * b.ln()) / (m1 - m2))
        .collect())
}

// ---------------------------------------------------------------------------
// model shapes and their κ-derivatives

/// `(1 − e^{−w}(1 + w))/w²`, so that `∫₀ᵗ u e^{−zu} du = t² ψ(zt)`.
fn psi(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        // Σ (−1)ⁿ (n+1) wⁿ/(n+2)!
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for n in 1..30 {
            let nf = n as f64;
            term *= -w * ((nf + 1.0) / (nf * (nf + 2.0)));
            sum += term;
        }
        sum
    } else {
        (1.0 - (-w).exp() * (1.0 + w)) / (w * w)
    }
}

#[derive(Debug, Clone, Copy)]
struct Shape {
    f: f64,
    d: f64,
    f_k: f64,
    d_k: f64,
}

fn shape(t: f64, kappa: f64) -> Shape {
    let e1 = (-kappa * t).exp();
    let em = (-kappa * t).exp_m1();
    let half = (0.5 * t).sin();
    let f = em * em + 4.0 * e1 * half * half;
    let f_k = -2.0 * t * e1 * e1 + 2.0 * t * e1 * t.cos();
    let (ci, _) = damped_trig_integrals(kappa, t);
    let d = (t + exp2_integral(kappa, t) - 2.0 * ci).max(0.0);
    // ∂κ E = −2t²ψ(2κt); ∂κ (C + iS) = −t²ψ((κ − i)t)
    let e_k = -2.0 * t * t * psi(Complex64::new(2.0 * kappa * t, 0.0)).re;
    let c_k = -t * t * psi(Complex64::new(kappa * t, -t)).re;
    Shape { f, d, f_k, d_k: e_k - 2.0 * c_k }
}

fn amplitude(g: f64, kappa: f64) -> f64 {
    4.0 * g * g / (1.0 + kappa * kappa)
}

// ---------------------------------------------------------------------------
// constrained parameter maps

fn softplus(u: f64) -> f64 {
    if u > 30.0 {
        u
    } else {
        u.exp().ln_1p()
    }
}

fn sigmoid(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

fn softplus_inv(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp_m1().ln()
    }
}

// ---------------------------------------------------------------------------
// Levenberg–Marquardt

/// Gradient-norm threshold for stationarity.
pub const GRADIENT_TOL: f64 = 1e-10;
/// Iteration cap of the damped least-squares loop.
pub const MAX_ITERATIONS: usize = 500;

struct LmOutcome {
    u: DVector<f64>,
    residuals: DVector<f64>,
    jacobian: DMatrix<f64>,
    iterations: usize,
}

/// Minimises `½‖r(u)‖²`. Stops when `‖Jᵀr‖ < GRADIENT_TOL`, or when no
/// damping yields a decrease and the last step is below rounding level
/// (the minimum is resolved to machine precision).
fn levenberg_marquardt<F>(u0: DVector<f64>, eval: F) -> Result<LmOutcome>
where
    F: Fn(&DVector<f64>) -> (DVector<f64>, DMatrix<f64>),
{
    let mut u = u0;
    let (mut r, mut j) = eval(&u);
    let mut cost = 0.5 * r.norm_squared();
    let mut lambda = 1e-3;
    let p = u.len();
    for it in 0..MAX_ITERATIONS {
        let grad = j.transpose() * &r;
        let gnorm = grad.norm();
        if gnorm < GRADIENT_TOL {
            return Ok(LmOutcome {
                u,
                residuals: r,
                jacobian: j,
                iterations: it,
            });
        }
        let jtj = j.transpose() * &j;
        let mut accepted = false;
        let mut last_step = f64::INFINITY;
        while lambda < 1e20 {
            let mut a = jtj.clone();
            for k in 0..p {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&(-&grad))) else {
                lambda *= 10.0;
                continue;
            };
            last_step = step.norm();
            let trial = &u + &step;
            let (rt, jt) = eval(&trial);
            let ct = 0.5 * rt.norm_squared();
            if ct.is_finite() && ct < cost {
                u = trial;
                r = rt;
                j = jt;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 4.0;
            if last_step <= 1e-15 * u.norm().max(1.0) {
                break;
            }
        }
        if !accepted
            && (last_step <= 1e-15 * u.norm().max(1.0) || lambda >= 1e20) {
                return Ok(LmOutcome {
                    u,
                    residuals: r,
                    jacobian: j,
                    iterations: it,
                });
            }
    }
    let gradient_norm = (j.transpose() * &r).norm();
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        gradient_norm,
        best: u.iter().copied().collect(),
    })
}

/// `√(s² (JᵀJ)⁻¹)` diagonal, `s² = ‖r‖²/(n − p)`.
fn standard_errors(residuals: &DVector<f64>, jacobian: &DMatrix<f64>) -> Option<Vec<f64>> {
    let (n, p) = jacobian.shape();
    if n <= p {
        return None;
    }
    let s2 = residuals.norm_squared() / (n - p) as f64;
    let inv = (jacobian.transpose() * jacobian).try_inverse()?;
    Some((0..p).map(|k| (s2 * inv[(k, k)]).max(0.0).sqrt()).collect())
}

// ---------------------------------------------------------------------------
// reports and fit entry points

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    DirectFit,
    TwoTemperature,
}

/// What fixes the overall scale of a direct fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Anchor {
    /// Each series carries its known `M`; `g`, `κ`, `N` are fitted.
    SeriesM,
    /// Bath scale `N` known; `g`, `κ`, `M` are fitted from one series.
    KnownN(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FitMode {
    Direct(Anchor),
    TwoTemperature,
}

/// Standard errors; `None` for parameters that were held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StdErrors {
    pub g: Option<f64>,
    pub kappa: Option<f64>,
    pub m: Option<f64>,
    pub n: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub g: f64,
    pub kappa: f64,
    pub m: f64,
    pub n: f64,
    pub std_errors: StdErrors,
    pub residual_norm: f64,
    pub iterations: usize,
    pub method: FitMethod,
}

impl EstimateReport {
    pub fn params(&self) -> ThermometryParams {
        ThermometryParams {
            g: self.g,
            kappa: self.kappa,
            m: self.m,
            n: self.n,
        }
    }

    /// Bath occupation `n̄ = (N − 1)/2`.
    pub fn nbar(&self) -> f64 {
        0.5 * (self.n - 1.0)
    }

    /// Initial-state occupation `m̄ = M − ½`.
    pub fn mbar(&self) -> f64 {
        self.m - 0.5
    }
}

fn kappa_grid() -> Vec<f64> {
    let n = 90;
    let (lo, hi) = (1e-4f64.ln(), 2.0f64.ln());
    (0..n).map(|k| (lo + (hi - lo) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// Two-column linear least squares `y ≈ a·x₁ + b·x₂`; returns `(a, b, ssr)`.
fn lsq2(x1: &[f64], x2: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let (mut s11, mut s12, mut s22, mut s1y, mut s2y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((a, b), c) in x1.iter().zip(x2).zip(y) {
        s11 += a * a;
        s12 += a * b;
        s22 += b * b;
        s1y += a * c;
        s2y += b * c;
    }
    let det = s11 * s22 - s12 * s12;
    if !(det.abs() > 1e-300) {
        return None;
    }
    let a = (s22 * s1y - s12 * s2y) / det;
    let b = (s11 * s2y - s12 * s1y) / det;
    let ssr = x1
        .iter()
        .zip(x2)
        .zip(y)
        .map(|((p, q), r)| (a * p + b * q - r).powi(2))
        .sum();
    Some((a, b, ssr))
}

fn require_signal(y: &[f64]) -> Result<()> {
    if y.iter().all(|v| v.abs() <= 1e-13) {
        return Err(Error::Degenerate(
            "fidelity is identically 1: no decoherence signal, coupling unidentifiable".into(),
        ));
    }
    Ok(())
}

/// Direct fit of `−ln F` to the closed-form model.
pub fn fit_direct(series: &[CoherenceSeries], anchor: Anchor) -> Result<EstimateReport> {
    if series.is_empty() {
        return Err(Error::Config("no series given".into()));
    }
    for s in series {
        s.validate()?;
        s.require_fit_span()?;
    }
    let ms: Vec<f64> = match anchor {
        Anchor::SeriesM => series.iter().map(known_m).collect::<Result<_>>()?,
        Anchor::KnownN(n) => {
            if !(n >= 1.0) {
                return Err(Error::Domain(format!("N must be >= 1, got {n}")));
            }
            if series.len() != 1 {
                return Err(Error::Config("a known-N fit takes exactly one series".into()));
            }
            vec![f64::NAN]
        }
    };
    let times: Vec<f64> = series.iter().flat_map(|s| s.times.iter().copied()).collect();
    let y: Vec<f64> = series.iter().flat_map(|s| s.neg_log()).collect();
    let m_of: Vec<f64> = series.iter().zip(&ms).flat_map(|(s, &m)| std::iter::repeat_n(m, s.len())).collect();
    require_signal(&y)?;

    // profile over κ: the model is linear in the remaining two combinations
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for kappa in kappa_grid() {
        let shapes: Vec<Shape> = times.iter().map(|&t| shape(t, kappa)).collect();
        let (x1, x2): (Vec<f64>, Vec<f64>) = match anchor {
            // y = A·(M f) + (AκN)·D
            Anchor::SeriesM => shapes.iter().zip(&m_of).map(|(s, m)| (m * s.f, s.d)).unzip(),
            // y = (A M)·f + A·(κN D)
            Anchor::KnownN(n) => shapes.iter().map(|s| (s.f, kappa * n * s.d)).unzip(),
        };
        if let Some((a, b, ssr)) = lsq2(&x1, &x2, &y) {
            if best.is_none_or(|bst| ssr < bst.3) {
                best = Some((kappa, a, b, ssr));
            }
        }
    }
    let (kappa0, a, b, _) = best.ok_or_else(|| Error::Degenerate("model matrix is singular".into()))?;
    let (amp, x0) = match anchor {
        Anchor::SeriesM => {
            let amp = a.max(1e-12);
            (amp, (b / (amp * kappa0)).max(1.0 + 1e-3))
        }
        Anchor::KnownN(_) => {
            let amp = b.max(1e-12);
            (amp, (a / amp).max(0.5 + 1e-3))
        }
    };
    let g0 = (amp * (1.0 + kappa0 * kappa0) / 4.0).sqrt();
    let floor = match anchor {
        Anchor::SeriesM => 1.0,
        Anchor::KnownN(_) => 0.5,
    };
    let u0 = DVector::from_vec(vec![g0.ln(), softplus_inv(kappa0), softplus_inv(x0 - floor)]);

    let eval = |u: &DVector<f64>| {
        let g = u[0].exp();
        let kappa = softplus(u[1]);
        let x = floor + softplus(u[2]);
        let amp = amplitude(g, kappa);
        let damp = -2.0 * kappa / (1.0 + kappa * kappa);
        let (dk, dx) = (sigmoid(u[1]), sigmoid(u[2]));
        let n_pts = times.len();
        let mut r = DVector::zeros(n_pts);
        let mut j = DMatrix::zeros(n_pts, 3);
        for i in 0..n_pts {
            let s = shape(times[i], kappa);
            let (m, n) = match anchor {
                Anchor::SeriesM => (m_of[i], x),
                Anchor::KnownN(n) => (x, n),
            };
            let inner = m * s.f + kappa * n * s.d;
            let model = amp * inner;
            r[i] = model - y[i];
            j[(i, 0)] = 2.0 * model;
            j[(i, 1)] = (damp * model + amp * (m * s.f_k + n * s.d + kappa * n * s.d_k)) * dk;
            j[(i, 2)] = match anchor {
                Anchor::SeriesM => amp * kappa * s.d,
                Anchor::KnownN(_) => amp * s.f,
            } * dx;
        }
        (r, j)
    };
    let out = levenberg_marquardt(u0, eval)?;
    let g = out.u[0].exp();
    let kappa = softplus(out.u[1]);
    let x = floor + softplus(out.u[2]);
    let se = standard_errors(&out.residuals, &out.jacobian);
    let se_at = |k: usize, scale: f64| se.as_ref().map(|v| v[k] * scale);
    let se_x = se_at(2, sigmoid(out.u[2]));
    let (m, n, std_m, std_n) = match anchor {
        Anchor::SeriesM => (ms[0], x, None, se_x),
        Anchor::KnownN(n) => (x, n, se_x, None),
    };
    Ok(EstimateReport {
        g,
        kappa,
        m,
        n,
        std_errors: StdErrors {
            g: se_at(0, g),
            kappa: se_at(1, sigmoid(out.u[1])),
            m: std_m,
            n: std_n,
        },
        residual_norm: out.residuals.norm(),
        iterations: out.iterations,
        method: FitMethod::DirectFit,
    })
}

/// Two-record pipeline: fit `(g, κ)` to the extracted `d²(t)`, then `N` to
/// the extracted bath term `κN δ(t)`. `M` is reported as the first series' value.
pub fn fit_two_temperature(s1: &CoherenceSeries, s2: &CoherenceSeries) -> Result<EstimateReport> {
    let d2 = extract_d2(s1, s2)?;
    let bath = extract_bath_term(s1, s2)?;
    s1.require_fit_span()?;
    require_signal(&d2)?;
    let times = &s1.times;

    let mut best: Option<(f64, f64, f64)> = None;
    for kappa in kappa_grid() {
        let f: Vec<f64> = times.iter().map(|&t| shape(t, kappa).f).collect();
        let (sff, sfy) = f.iter().zip(&d2).fold((0.0, 0.0), |(a, b), (x, y)| (a + x * x, b + x * y));
        if sff <= 0.0 {
            continue;
        }
        let amp = sfy / sff;
        let ssr: f64 = f.iter().zip(&d2).map(|(x, y)| (amp * x - y).powi(2)).sum();
        if best.is_none_or(|b| ssr < b.2) {
            best = Some((kappa, amp, ssr));
        }
    }
    let (kappa0, amp0, _) = best.ok_or_else(|| Error::Degenerate("empty record".into()))?;
    let g0 = (amp0.max(1e-12) * (1.0 + kappa0 * kappa0) / 4.0).sqrt();
    let stage1 = levenberg_marquardt(DVector::from_vec(vec![g0.ln(), softplus_inv(kappa0)]), |u| {
        let g = u[0].exp();
        let kappa = softplus(u[1]);
        let amp = amplitude(g, kappa);
        let damp = -2.0 * kappa / (1.0 + kappa * kappa);
        let dk = sigmoid(u[1]);
        let mut r = DVector::zeros(times.len());
        let mut j = DMatrix::zeros(times.len(), 2);
        for (i, &t) in times.iter().enumerate() {
            let s = shape(t, kappa);
            let model = amp * s.f;
            r[i] = model - d2[i];
            j[(i, 0)] = 2.0 * model;
            j[(i, 1)] = (damp * model + amp * s.f_k) * dk;
        }
        (r, j)
    })?;
    let g = stage1.u[0].exp();
    let kappa = softplus(stage1.u[1]);
    let se1 = standard_errors(&stage1.residuals, &stage1.jacobian);

    let basis: Vec<f64> = times.iter().map(|&t| kappa * delta_integral(t, g, kappa)).collect();
    let (sbb, sby) = basis.iter().zip(&bath).fold((0.0, 0.0), |(a, b), (x, y)| (a + x * x, b + x * y));
    if !(sbb > 0.0) {
        return Err(Error::Degenerate("bath term vanishes (κ = 0): N unidentifiable".into()));
    }
    let n0 = (sby / sbb).max(1.0 + 1e-3);
    let stage2 = levenberg_marquardt(DVector::from_vec(vec![softplus_inv(n0 - 1.0)]), |u| {
        let n = 1.0 + softplus(u[0]);
        let dn = sigmoid(u[0]);
        let r = DVector::from_iterator(basis.len(), basis.iter().zip(&bath).map(|(b, y)| n * b - y));
        let j = DMatrix::from_iterator(basis.len(), 1, basis.iter().map(|b| b * dn));
        (r, j)
    })?;
    let n = 1.0 + softplus(stage2.u[0]);
    let se2 = standard_errors(&stage2.residuals, &stage2.jacobian);

    Ok(EstimateReport {
        g,
        kappa,
        m: known_m(s1)?,
        n,
        std_errors: StdErrors {
            g: se1.as_ref().map(|v| v[0] * g),
            kappa: se1.as_ref().map(|v| v[1] * sigmoid(stage1.u[1])),
            m: None,
            n: se2.as_ref().map(|v| v[0] * sigmoid(stage2.u[0])),
        },
        residual_norm: (stage1.residuals.norm_squared() + stage2.residuals.norm_squared()).sqrt(),
        iterations: stage1.iterations + stage2.iterations,
        method: FitMethod::TwoTemperature,
    })
}

/// Dispatches on `mode`; two-temperature mode takes exactly two series.
pub fn fit_parameters(series: &[CoherenceSeries], mode: FitMode) -> Result<EstimateReport> {
    match mode {
        FitMode::Direct(anchor) => fit_direct(series, anchor),
        FitMode::TwoTemperature => match series {
            [a, b] => fit_two_temperature(a, b),
            _ => Err(Error::Config(format!(
                "two-temperature mode needs exactly two series, got {}",
                series.len()
            ))),
        },
    }
}
