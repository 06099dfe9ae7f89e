//! Statistics helpers, reproducibility and the parallel/sequential contract.

mod common;

use proptest::prelude::*;
use reparam_lab::experiments::{estimate_mean, fit_line, fitted_order, mean_stderr, mixing_probe, probe_frames, Cell};
use reparam_lab::fuchsian::InvariantObservable;
use reparam_lab::par;
use reparam_lab::report::to_csv;
use reparam_lab::reparam::{h_delta, tau_delta, QuadratureSpec, Route};

#[test]
fn constant_observable_has_exact_mean_and_zero_error() {
    let psi = InvariantObservable::constant(common::surface(), 2.5).unwrap();
    assert_eq!(estimate_mean(&psi, 2000, 4).unwrap(), (2.5, 0.0));
    assert!(estimate_mean(&psi, 10, 4).is_err());
}

#[test]
fn mean_stderr_matches_two_pass_formula() {
    let xs = [1.0, 4.0, 2.0, 8.0, 5.0];
    let (m, se) = mean_stderr(&xs);
    assert_eq!(m, 4.0);
    // Sample variance 7.5, so the standard error is sqrt(7.5/5).
    assert!((se - 1.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn constant_test_function_has_no_correlation() {
    let psi = common::psi();
    let phi = InvariantObservable::test_function(common::surface(), 0.7, Vec::new()).unwrap();
    let rep = mixing_probe(&psi, &phi, &phi, &[1.0, 2.0], 1000, 3).unwrap();
    let table = &rep.tables[0];
    assert_eq!(table.rows.len(), 3);
    for row in &table.rows {
        assert!(matches!(row[1], Cell::Float(c) if c.abs() < 1e-28), "{:?}", row);
    }
}

#[test]
fn reports_are_reproducible() {
    let config = common::default_config();
    let surface = config.surface().unwrap();
    let psi = config.observable(&surface).unwrap();
    let phi = config.test_function(&surface).unwrap();
    let run = || to_csv(&[mixing_probe(&psi, &phi, &phi, &[1.0, 2.0], 2000, 8).unwrap()]);
    assert_eq!(run(), run());
}

#[test]
fn parallel_maps_equal_sequential_maps() {
    let psi = common::psi();
    let frames = probe_frames(&psi, 12, 5).unwrap();
    let delta = 0.05;
    let spec = QuadratureSpec::for_delta(delta);
    let tau = |k: usize| tau_delta(&psi, &frames[k], delta, &spec).unwrap().total().to_bits();
    assert_eq!(par::map_indexed(frames.len(), tau), par::map_indexed_seq(frames.len(), tau));
    let h = |v: &reparam_lab::lie::GroupElement| h_delta(&psi, v, delta, &spec, Route::CrossRatio).unwrap().to_bits();
    let seq: Vec<u64> = frames.iter().map(h).collect();
    assert_eq!(par::map_slice(&frames, h), seq);
}

proptest! {
    #[test]
    fn fit_line_recovers_exact_lines(a in -5.0..5.0f64, b in -5.0..5.0f64, n in 3usize..20) {
        let xs: Vec<f64> = (0..n).map(|k| k as f64 * 0.37 - 1.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| a + b * x).collect();
        let (slope, intercept, se) = fit_line(&xs, &ys);
        prop_assert!((slope - b).abs() < 1e-10 && (intercept - a).abs() < 1e-10);
        prop_assert!(se < 1e-9);
    }

    #[test]
    fn fitted_order_of_power_laws(p in -3.0..3.0f64, c in 0.1..10.0f64) {
        let xs = [0.08, 0.04, 0.02, 0.01];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| c * x.powf(p)).collect();
        prop_assert!((fitted_order(&xs, &ys) - p).abs() < 1e-10);
    }
}
