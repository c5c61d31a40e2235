//! Chord and Wigner functions of a few Gaussian states.

use qubit_probe::phase_space::{Covariance2, GaussianState, PhaseVector};

fn main() -> qubit_probe::Result<()> {
    let states = [
        ("vacuum", GaussianState::thermal(0.0)?),
        ("thermal m=1", GaussianState::thermal(1.0)?),
        ("coherent (1.5, -0.5)", GaussianState::coherent(1.5, -0.5)?),
        (
            "squeezed",
            GaussianState::new(PhaseVector::zeros(), Covariance2::new(0.25, 0.0, 1.0)?)?,
        ),
    ];
    let r = PhaseVector::new(1.0, 0.5);
    let x = PhaseVector::new(0.5, 0.0);
    println!("{:<22} {:>22} {:>12} {:>8}", "state", "chord(1, 0.5)", "W(0.5, 0)", "purity");
    for (name, s) in &states {
        let c = s.chord(&r);
        println!("{name:<22} {:>10.6}{:+.6}i {:>12.6} {:>8.4}", c.re, c.im, s.wigner(&x), s.purity());
    }
    Ok(())
}
