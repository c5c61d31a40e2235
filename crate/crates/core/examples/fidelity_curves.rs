//! Generalized and Uhlmann-Jozsa fidelities for the weak-coupling sweep.

use qubit_probe::commands::{PANEL_COUPLINGS, PANEL_DAMPINGS};
use qubit_probe::fidelity::{fidelity_gen_thermal, fidelity_uj_blocks, fidelity_uj_long_time};
use qubit_probe::phase_space::SystemParams;

fn main() -> qubit_probe::Result<()> {
    let (mbar, nbar) = (0.0, 0.0);
    let m = mbar + 0.5;
    for &kappa in &PANEL_DAMPINGS {
        for &g in &PANEL_COUPLINGS {
            let p = SystemParams::new(g, kappa, 0.0, nbar, mbar)?;
            let samples: Vec<String> = [10.0, 50.0, 100.0, 300.0]
                .iter()
                .map(|&t| Ok(format!("{:.4}/{:.4}", fidelity_gen_thermal(t, &p, m)?, fidelity_uj_blocks(t, &p, m)?)))
                .collect::<qubit_probe::Result<_>>()?;
            let limit = fidelity_uj_long_time(&p).map_or("-".into(), |v| format!("{v:.6}"));
            println!("g={g:<5} kappa={kappa:<5} F_gen/F_UJ at t=10,50,100,300: {}  F_UJ(inf)={limit}", samples.join("  "));
        }
    }
    Ok(())
}
