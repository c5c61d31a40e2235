use qubit_probe::fidelity::fidelity_uj_general;
use qubit_probe::grid::GridSpec;
use qubit_probe::oracle::measures::wigner_grid;
use qubit_probe::oracle::{compare_point, evolve_blocks, random_points, run_validation, uhlmann_fidelity, OracleConfig, ValidationPoint};
use qubit_probe::phase_space::{GaussianState, PhaseVector, QubitInitState, SystemParams};
use qubit_probe::propagator::{kernel_at, reduced_wigner};
use qubit_probe::Error;

#[test]
fn small_random_suite_agrees() {
    let report = run_validation(&random_points(3, 99), &OracleConfig::default()).unwrap();
    assert!(report.pass, "{:?}", report.max_deviation);
}

#[test]
fn uncoupled_point_is_exact() {
    let point = ValidationPoint {
        params: SystemParams::new(0.0, 0.15, 0.4, 1.2, 0.7).unwrap(),
        t: 9.0,
    };
    let rep = compare_point(&point, &OracleConfig::default()).unwrap();
    let d = rep.deviation;
    for v in [d.coherence, d.fidelity_generalized, d.fidelity_uj, d.purity_qubit, d.purity_oscillator] {
        assert!(v < 1e-9, "{d:?}");
    }
}

#[test]
fn tiny_truncation_reports_leak() {
    let point = ValidationPoint {
        params: SystemParams::new(0.3, 0.1, 0.0, 0.0, 0.0).unwrap(),
        t: 5.0,
    };
    match compare_point(&point, &OracleConfig::fixed(4)) {
        Err(Error::TruncationLeak { dim, suggested, .. }) => {
            assert_eq!(dim, 4);
            assert!(suggested > 4);
        }
        other => panic!("expected truncation leak, got {other:?}"),
    }
}

#[test]
fn displaced_initial_state_agrees() {
    let params = SystemParams::new(0.25, 0.08, 0.3, 0.5, 0.0).unwrap();
    let init = GaussianState::coherent(0.8, -0.4).unwrap();
    let times = [0.0, 2.5, 7.0];
    let sets = evolve_blocks(&params, &init, &times, &OracleConfig::default()).unwrap();
    for set in &sets {
        let k = kernel_at(set.t, &params, &init.cov).unwrap();
        let coh = k.coherence(&init);
        assert!((set.rho01.trace() - coh).norm() < 1e-6, "t={} {} vs {}", set.t, set.rho01.trace(), coh);
        let fu = uhlmann_fidelity(&set.rho00.entries, &set.rho11.entries).unwrap();
        let fa = fidelity_uj_general(set.t, &params, &init).unwrap();
        assert!((fu - fa).abs() < 1e-5, "t={} {fu} vs {fa}", set.t);
    }
}

#[test]
fn oracle_wigner_matches_gaussian_mixture() {
    let params = SystemParams::new(0.6, 0.1, 0.0, 0.2, 0.0).unwrap();
    let init = GaussianState::thermal(0.0).unwrap();
    let qubit = QubitInitState::plus();
    let t = 3.0;
    let set = evolve_blocks(&params, &init, &[t], &OracleConfig::default()).unwrap().pop().unwrap();
    let rho = &set.rho00.entries * num_complex::Complex64::new(0.5, 0.0) + &set.rho11.entries * num_complex::Complex64::new(0.5, 0.0);
    let spec = GridSpec::square(3.0, 0.5);
    let grid = wigner_grid(&rho, spec, 0.1).unwrap();
    let mut worst: f64 = 0.0;
    for (x, w) in spec.points().zip(&grid.values) {
        let exact = reduced_wigner(&PhaseVector::new(x[0], x[1]), t, &params, &init, &qubit).unwrap();
        worst = worst.max((w - exact).abs());
    }
    assert!(worst < 1e-6, "max Wigner deviation {worst}");
}
