//! Recover coupling, damping and temperatures from noisy decoherence records.
//!
//! cargo run --release --example thermometry -- [realizations] [noise] [seed]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qubit_probe::estimation::{fit_direct, fit_two_temperature, synthetic_series, Anchor, ThermometryParams};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let runs: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100);
    let noise: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.01);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);

    let truth = ThermometryParams { g: 0.1, kappa: 0.05, m: 1.0, n: 2.0 };
    let hot = ThermometryParams { m: 2.5, ..truth };
    let times: Vec<f64> = (0..=600).map(|k| k as f64 * 0.05).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let rel = |x: f64, y: f64| (x / y - 1.0).abs();
    let mut errs: [Vec<f64>; 4] = Default::default();
    let mut two: [Vec<f64>; 3] = Default::default();
    for _ in 0..runs {
        let s = synthetic_series(&truth, &times, noise, &mut rng)?;
        let by_m = fit_direct(std::slice::from_ref(&s), Anchor::SeriesM)?;
        let by_n = fit_direct(std::slice::from_ref(&s), Anchor::KnownN(truth.n))?;
        errs[0].push(rel(by_m.g, truth.g));
        errs[1].push(rel(by_m.kappa, truth.kappa));
        errs[2].push(rel(by_n.m, truth.m));
        errs[3].push(rel(by_m.n, truth.n));

        let s_hot = synthetic_series(&hot, &times, noise, &mut rng)?;
        let tt = fit_two_temperature(&s, &s_hot)?;
        two[0].push(rel(tt.g, truth.g));
        two[1].push(rel(tt.kappa, truth.kappa));
        two[2].push(rel(tt.n, truth.n));
    }
    println!("{runs} records, {:.1}% multiplicative noise", 100.0 * noise);
    println!("direct fit, median relative error:");
    for (name, e) in ["g", "kappa", "M", "N"].iter().zip(errs) {
        println!("  {name:>6}: {:.4}", median(e));
    }
    println!("two-temperature pipeline (M = 1 and 2.5), median relative error:");
    for (name, e) in ["g", "kappa", "N"].iter().zip(two) {
        println!("  {name:>6}: {:.4}", median(e));
    }
    Ok(())
}
