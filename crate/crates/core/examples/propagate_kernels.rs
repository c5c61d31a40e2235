//! Closed-form propagation kernels and the decoherence function.
//!
//! cargo run --example propagate_kernels -- [g] [kappa] [nbar]

use qubit_probe::fidelity::fidelity_generalized;
use qubit_probe::phase_space::{GaussianState, SystemParams};
use qubit_probe::propagator::kernel_at;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<f64>());
    let g = args.next().transpose()?.unwrap_or(2.5);
    let kappa = args.next().transpose()?.unwrap_or(0.1);
    let nbar = args.next().transpose()?.unwrap_or(0.582);
    let params = SystemParams::new(g, kappa, 0.0, nbar, 0.0)?;
    let init = GaussianState::thermal(0.0)?;

    println!("{:>6} {:>10} {:>10} {:>10} {:>12} {:>10} {:>12}", "t", "d1", "d2", "|d|", "delta", "alpha", "F_gen");
    for k in 0..=12 {
        let t = 5.0 * k as f64;
        let kern = kernel_at(t, &params, &init.cov)?;
        println!(
            "{t:>6.1} {:>10.5} {:>10.5} {:>10.5} {:>12.5} {:>10.5} {:>12.4e}",
            kern.d[0],
            kern.d[1],
            kern.d.norm(),
            kern.delta,
            kern.alpha,
            fidelity_generalized(t, &params, &init)?
        );
    }
    Ok(())
}
