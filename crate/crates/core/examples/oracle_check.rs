//! Cross-check the closed forms against the truncated Fock-basis integration
//! at randomly drawn parameter points.
//!
//! cargo run --release --example oracle_check -- [points] [seed]

use std::time::Instant;

use qubit_probe::oracle::{random_points, run_validation, OracleConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2024);

    let start = Instant::now();
    let report = run_validation(&random_points(n, seed), &OracleConfig::default())?;
    println!("{:>6} {:>6} {:>6} {:>6} {:>6} {:>5}  {:>9} {:>9} {:>9}", "g", "kappa", "nbar", "mbar", "t", "dim", "dF_gen", "dF_UJ", "dP_osc");
    for r in &report.points {
        let p = &r.point.params;
        println!(
            "{:6.3} {:6.3} {:6.3} {:6.3} {:6.2} {:5}  {:9.2e} {:9.2e} {:9.2e}",
            p.g, p.kappa, p.nbar, p.mbar, r.point.t, r.dim, r.deviation.fidelity_generalized, r.deviation.fidelity_uj, r.deviation.purity_oscillator
        );
    }
    println!("max deviations: {}", serde_json::to_string_pretty(&report.max_deviation)?);
    println!("pass: {}  ({:.1} s)", report.pass, start.elapsed().as_secs_f64());
    Ok(())
}
