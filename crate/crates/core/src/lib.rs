//! Analytic dynamics of a qubit probe dephasing-coupled to a damped harmonic
//! oscillator at finite temperature.

pub mod error;
pub mod estimation;
pub mod fidelity;
pub mod commands;
pub mod grid;
pub mod io;
pub mod oracle;
pub mod phase_space;
pub mod propagator;
pub mod scenario;

pub use error::{Error, Result};
