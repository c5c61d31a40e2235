//! Dormand–Prince 5(4) stepping for complex systems `ẏ = f(t, y)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Adaptive integrator holding its stage buffers between calls, so that a
/// trajectory can be advanced from one sample time to the next.
pub struct Dopri5<F> {
    rhs: F,
    control: StepControl,
    h: f64,
    k: [Vec<Complex64>; 7],
    tmp: Vec<Complex64>,
    y_new: Vec<Complex64>,
    fsal_valid: bool,
    pub stats: Stats,
}

impl<F> Dopri5<F>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    pub fn new(rhs: F, n: usize, control: StepControl) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self {
            rhs,
            control,
            h: 1e-2,
            k: std::array::from_fn(|_| z.clone()),
            tmp: z.clone(),
            y_new: z,
            fsal_valid: false,
            stats: Stats::default(),
        }
    }

    fn stage(&mut self, t: f64, y: &[Complex64], h: f64, coeffs: &[(usize, f64)], out: usize) {
        for i in 0..y.len() {
            let mut acc = y[i];
            for &(j, a) in coeffs {
                acc += self.k[j][i] * (h * a);
            }
            self.tmp[i] = acc;
        }
        let (tmp, k) = (&self.tmp, &mut self.k[out]);
        (self.rhs)(t, tmp, k);
        self.stats.evaluations += 1;
    }

    /// Advances `y` from `t0` to exactly `t1 ≥ t0`.
    pub fn advance(&mut self, y: &mut [Complex64], t0: f64, t1: f64) -> Result<()> {
        if t1 < t0 {
            return Err(Error::Integrator(format!("cannot integrate backwards from {t0} to {t1}")));
        }
        let mut t = t0;
        if !self.fsal_valid {
            let k0 = &mut self.k[0];
            (self.rhs)(t, y, k0);
            self.stats.evaluations += 1;
            self.fsal_valid = true;
        }
        let mut steps = 0usize;
        while t < t1 {
            steps += 1;
            if steps > self.control.max_steps {
                return Err(Error::Integrator(format!("step limit reached at t = {t}")));
            }
            let last = t + self.h >= t1;
            let h = if last { t1 - t } else { self.h };

            self.stage(t + C2 * h, y, h, &[(0, A21)], 1);
            self.stage(t + C3 * h, y, h, &[(0, A31), (1, A32)], 2);
            self.stage(t + C4 * h, y, h, &[(0, A41), (1, A42), (2, A43)], 3);
            self.stage(t + C5 * h, y, h, &[(0, A51), (1, A52), (2, A53), (3, A54)], 4);
            self.stage(t + h, y, h, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], 5);
            for i in 0..y.len() {
                let k = &self.k;
                self.y_new[i] = y[i]
                    + (k[0][i] * A71 + k[2][i] * A73 + k[3][i] * A74 + k[4][i] * A75 + k[5][i] * A76) * h;
            }
            {
                let (yn, k6) = (&self.y_new, &mut self.k[6]);
                (self.rhs)(t + h, yn, k6);
                self.stats.evaluations += 1;
            }

            let mut err2 = 0.0;
            for i in 0..y.len() {
                let k = &self.k;
                let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * h;
                let sc = self.control.abs_tol + self.control.rel_tol * y[i].norm().max(self.y_new[i].norm());
                err2 += e.norm_sqr() / (sc * sc);
            }
            let err = (err2 / y.len() as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::Integrator(format!("non-finite error estimate at t = {t}")));
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                t = if last { t1 } else { t + h };
                self.stats.accepted += 1;
                // keep the free-running step size when the last step was clamped
                if !last || h >= self.h {
                    self.h = h * factor;
                }
            } else {
                self.stats.rejected += 1;
                self.h = h * factor.min(1.0);
                if self.h < 1e-14 * t1.abs().max(1.0) {
                    return Err(Error::Integrator(format!("step size underflow at t = {t}")));
                }
            }
        }
        Ok(())
    }
}
