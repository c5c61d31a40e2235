//! End-to-end acceptance checks. Prints one line per criterion and exits
//! nonzero when any of them fails.

mod common;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{delta_quad, gamma_quad, max_abs};
use qubit_probe::commands::{auto_grid, fig1_scenario, wigner_field, FIG1_TIMES, PANEL_COUPLINGS, PANEL_DAMPINGS};
use qubit_probe::estimation::{fit_direct, fit_two_temperature, log_derivative_model, synthetic_series, Anchor, ThermometryParams};
use qubit_probe::fidelity::{fidelity_gen_thermal, fidelity_uj_blocks, fidelity_uj_long_time};
use qubit_probe::oracle::{random_points, run_validation, OracleConfig};
use qubit_probe::phase_space::SystemParams;
use qubit_probe::propagator::{d_squared, delta_integral, displacement_vector, eta_vector, gamma_vector};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sys(g: f64, kappa: f64, nbar: f64, mbar: f64) -> SystemParams {
    SystemParams::new(g, kappa, 0.0, nbar, mbar).unwrap()
}

fn samples(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let report = match run_validation(&random_points(20, 2024), &OracleConfig::default()) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("oracle error: {e}")),
    };
    let secs = start.elapsed().as_secs_f64();
    let max_dim = report.points.iter().map(|p| p.dim).max().unwrap_or(0);
    let d = report.max_deviation;
    outcome(
        report.pass && secs < 120.0 && max_dim <= 100,
        format!(
            "max dev coherence {:.1e}, F_gen {:.1e}, F_UJ {:.1e}, P_q {:.1e}, P_osc {:.1e}; dim <= {max_dim}; {secs:.1} s",
            d.coherence, d.fidelity_generalized, d.fidelity_uj, d.purity_qubit, d.purity_oscillator
        ),
    )
}

fn unitary_limit() -> Outcome {
    let (g, m) = (0.1, 0.5);
    let p = sys(g, 1e-6, 0.0, 0.0);
    let err = max_abs(samples(0.0, 4.0 * std::f64::consts::PI, 1e-3).into_iter().map(|t| {
        fidelity_gen_thermal(t, &p, m).unwrap() - (-8.0 * m * g * g * (1.0 - t.cos())).exp()
    }));
    outcome(err < 1e-4, format!("max |F_gen - unitary form| = {err:.2e}"))
}

fn long_time_constants() -> Outcome {
    let (g, k, n) = (0.2, 0.1, 0.0);
    let p = sys(g, k, n, 0.0);
    let big_n = 2.0 * n + 1.0;
    let target = (-g * g / (big_n * (1.0 + k * k))).exp();
    let fuj = fidelity_uj_blocks(300.0, &p, 0.5).unwrap();
    let fuj_ok = (fuj - target).abs() < 1e-6;

    // least-squares slope of -ln F_gen on [100, 200]
    let ts = samples(100.0, 200.0, 0.05);
    let ys: Vec<f64> = ts.iter().map(|&t| -fidelity_gen_thermal(t, &p, 0.5).unwrap().ln()).collect();
    let nf = ts.len() as f64;
    let (mt, my) = (ts.iter().sum::<f64>() / nf, ys.iter().sum::<f64>() / nf);
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - mt) * (y - my)).sum();
    let sxx: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
    let rate = sxy / sxx;
    let expected = 4.0 * g * g * k * big_n / (1.0 + k * k);
    let rate_ok = (rate - expected).abs() < 1e-4;
    outcome(
        fuj_ok && rate_ok,
        format!(
            "F_UJ(300) = {fuj:.7} vs {target:.7} ({}); decay rate {rate:.7} vs {expected:.7} ({})",
            if fuj_ok { "ok" } else { "off" },
            if rate_ok { "ok" } else { "off" }
        ),
    )
}

fn kernel_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ident: f64 = 0.0;
    for _ in 0..1000 {
        let (g, k, t) = (rng.random_range(0.0..3.0), rng.random_range(0.0..1.0), rng.random_range(0.0..100.0));
        let p = sys(g, k, 0.0, 0.0);
        let d = displacement_vector(t, &p);
        let eta = eta_vector(t, &p);
        ident = ident
            .max((eta[0] + d[1]).abs())
            .max((eta[1] + d[0]).abs())
            .max((d.norm_squared() - d_squared(t, g, k)).abs());
    }
    let mut quad: f64 = 0.0;
    for _ in 0..20 {
        let (g, k, t) = (rng.random_range(0.0..1.0), rng.random_range(0.0..0.5), rng.random_range(0.0..20.0));
        let gv = gamma_vector(t, &sys(g, k, 0.0, 0.0));
        let gq = gamma_quad(t, g, k);
        quad = quad
            .max((delta_integral(t, g, k) - delta_quad(t, g, k)).abs())
            .max((gv - gq).amax());
    }
    outcome(
        ident < 1e-12 && quad < 1e-9,
        format!("eta/|d|^2 identities max err {ident:.1e} (1000 points); delta, Gamma vs quadrature {quad:.1e} (20 points)"),
    )
}

fn phase_space_snapshots() -> Outcome {
    let cfg = fig1_scenario();
    let (params, init, qubit) = (cfg.params().unwrap(), cfg.initial_state().unwrap(), cfg.qubit().unwrap());
    let mut worst: f64 = 0.0;
    let mut sep50 = f64::NAN;
    for &t in &FIG1_TIMES {
        let spec = auto_grid(&params, &init, t, 0.05).unwrap();
        let grid = wigner_field(&params, &init, &qubit, t, spec).unwrap();
        let half = 0.5 * displacement_vector(t, &params);
        if t == 0.0 {
            let c = grid.peak_in(spec.q_min, spec.q_max, spec.p_min, spec.p_max).unwrap();
            worst = worst.max(c.norm());
            continue;
        }
        // lobes lie on opposite sides of q = 0 whenever |d1| dominates
        assert!(half[0].abs() > half[1].abs());
        let right = grid.peak_in(0.0, spec.q_max, spec.p_min, spec.p_max).unwrap();
        let left = grid.peak_in(spec.q_min, 0.0, spec.p_min, spec.p_max).unwrap();
        let (plus, minus) = if half[0] > 0.0 { (right, left) } else { (left, right) };
        worst = worst.max((plus - half).amax()).max((minus + half).amax());
        if t == 50.0 {
            sep50 = (plus - minus).norm();
        }
    }
    let ok = worst < 1e-3 && (sep50 - 4.975).abs() < 0.05;
    outcome(
        ok,
        format!("lobe centres within {worst:.1e} of +-d/2 at t = 0, 3, 10, 50; separation at t = 50 is {sep50:.4}"),
    )
}

fn fidelity_panels() -> Outcome {
    let ts = samples(0.05, 100.0, 0.05);
    let mut ordered = true;
    for &(mbar, nbar) in &[(0.0, 0.0), (1.0, 0.5), (2.0, 2.0)] {
        for &k in &PANEL_DAMPINGS {
            for &t in &ts {
                let f: Vec<f64> = PANEL_COUPLINGS
                    .iter()
                    .map(|&g| fidelity_gen_thermal(t, &sys(g, k, nbar, mbar), mbar + 0.5).unwrap())
                    .collect();
                ordered &= f.windows(2).all(|w| w[1] < w[0]);
            }
        }
    }

    // oscillation period from successive maxima, and the long-time limit
    let mut worst_period: f64 = 0.0;
    let mut worst_limit: f64 = 0.0;
    for &k in &PANEL_DAMPINGS {
        for &g in &PANEL_COUPLINGS {
            let p = sys(g, k, 0.0, 0.0);
            let ts = samples(0.0, 40.0, 1e-3);
            let f: Vec<f64> = ts.iter().map(|&t| fidelity_uj_blocks(t, &p, 0.5).unwrap()).collect();
            let peaks: Vec<f64> = (1..f.len() - 1).filter(|&i| f[i] > f[i - 1] && f[i] >= f[i + 1]).map(|i| ts[i]).collect();
            let period = (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64;
            worst_period = worst_period.max((period / std::f64::consts::TAU - 1.0).abs());
            let late = fidelity_uj_blocks(25.0 / k, &p, 0.5).unwrap();
            worst_limit = worst_limit.max((late - fidelity_uj_long_time(&p).unwrap()).abs());
        }
    }
    outcome(
        ordered && worst_period < 0.01 && worst_limit < 1e-8,
        format!(
            "F_gen ordered in g at every t: {ordered}; F_UJ period / 2pi - 1 <= {worst_period:.1e}; |F_UJ(late) - limit| <= {worst_limit:.1e}"
        ),
    )
}

fn thermometry() -> Outcome {
    let start = Instant::now();
    let truth = ThermometryParams { g: 0.1, kappa: 0.05, m: 1.0, n: 2.0 };
    let hot = ThermometryParams { m: 2.5, ..truth };
    let times = samples(0.0, 30.0, 0.05);
    let rel = |x: f64, y: f64| (x / y - 1.0).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let clean = synthetic_series(&truth, &times, 0.0, &mut rng).unwrap();
    let by_m = fit_direct(std::slice::from_ref(&clean), Anchor::SeriesM).unwrap();
    let by_n = fit_direct(std::slice::from_ref(&clean), Anchor::KnownN(truth.n)).unwrap();
    let noiseless = [rel(by_m.g, truth.g), rel(by_m.kappa, truth.kappa), rel(by_n.m, truth.m), rel(by_m.n, truth.n)]
        .into_iter()
        .fold(0.0, f64::max);

    let mut errs: [Vec<f64>; 4] = Default::default();
    let mut two: [Vec<f64>; 3] = Default::default();
    let mut failures = 0;
    for _ in 0..100 {
        let s = synthetic_series(&truth, &times, 0.01, &mut rng).unwrap();
        let s_hot = synthetic_series(&hot, &times, 0.01, &mut rng).unwrap();
        match (
            fit_direct(std::slice::from_ref(&s), Anchor::SeriesM),
            fit_direct(std::slice::from_ref(&s), Anchor::KnownN(truth.n)),
            fit_two_temperature(&s, &s_hot),
        ) {
            (Ok(a), Ok(b), Ok(c)) => {
                errs[0].push(rel(a.g, truth.g));
                errs[1].push(rel(a.kappa, truth.kappa));
                errs[2].push(rel(b.m, truth.m));
                errs[3].push(rel(a.n, truth.n));
                two[0].push(rel(c.g, truth.g));
                two[1].push(rel(c.kappa, truth.kappa));
                two[2].push(rel(c.n, truth.n));
            }
            _ => failures += 1,
        }
    }
    let med: Vec<f64> = errs.into_iter().map(median).collect();
    let med2: Vec<f64> = two.into_iter().map(median).collect();
    let secs = start.elapsed().as_secs_f64();
    let worst = med.iter().chain(&med2).fold(0.0f64, |a, &b| a.max(b));
    outcome(
        noiseless < 1e-3 && worst < 0.05 && failures == 0 && secs < 60.0,
        format!(
            "noiseless max rel err {noiseless:.1e}; 1% noise medians g {:.3}, kappa {:.3}, M {:.3}, N {:.3} (two-temperature g {:.3}, kappa {:.3}, N {:.3}); {failures} failed fits; {secs:.1} s",
            med[0], med[1], med[2], med[3], med2[0], med2[1], med2[2]
        ),
    )
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let g = rng.random_range(0.0..0.5);
        let k = rng.random_range(0.0..0.3);
        let nbar = rng.random_range(0.0..2.0);
        let mbar = rng.random_range(0.0..2.0);
        let t = rng.random_range(0.01..50.0);
        let p = sys(g, k, nbar, mbar);
        let m = mbar + 0.5;
        let nlf = |t: f64| -fidelity_gen_thermal(t, &p, m).unwrap().ln();
        let fd = (nlf(t + h) - nlf(t - h)) / (2.0 * h);
        worst = worst.max((fd - log_derivative_model(t, g, k, m, 2.0 * nbar + 1.0)).abs());
    }
    outcome(worst < 1e-7, format!("max |H - central difference| = {worst:.1e} over 500 points"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("unitary limit", unitary_limit),
        ("long-time constants", long_time_constants),
        ("kernel identities", kernel_identities),
        ("phase-space snapshots", phase_space_snapshots),
        ("fidelity panel shapes", fidelity_panels),
        ("thermometry round trip", thermometry),
        ("gradient check", gradient_check),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {} {}: {} | {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
