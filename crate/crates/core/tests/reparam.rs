//! Time-changed flow quantities against independent integrators, finite
//! differences and the constant-observable reduction.

mod common;

use proptest::prelude::*;
use reparam_lab::boundary::{cross_ratio, BoundaryPoint::Finite};
use reparam_lab::experiments::probe_frames;
use reparam_lab::fuchsian::InvariantObservable;
use reparam_lab::lie::{flow, Generator, GroupElement};
use reparam_lab::reparam::{
    cross_ratio_psi, h_delta, orbit_integral, parry_cocycle, reparam_flow, reparam_time, stable_pair, tau_delta,
    unstable_pair, QuadratureSpec, Route, Side,
};

/// Fixed-step classical RK4 for `dσ/dτ = 1/ψ(f^σ v)`.
fn rk4_time(psi: &InvariantObservable, v: &GroupElement, t: f64, steps: usize) -> f64 {
    let rate = |s: f64| 1.0 / psi.value(&flow(v, Generator::Geodesic, s).unwrap()).unwrap();
    let h = t / steps as f64;
    let mut s = 0.0;
    for _ in 0..steps {
        let k1 = rate(s);
        let k2 = rate(s + 0.5 * h * k1);
        let k3 = rate(s + 0.5 * h * k2);
        let k4 = rate(s + h * k3);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    s
}

fn frames(m: usize) -> (InvariantObservable, Vec<GroupElement>) {
    let psi = common::psi();
    let frames = probe_frames(&psi, m, 17).unwrap();
    (psi, frames)
}

#[test]
fn reparam_time_matches_rk4_and_inverts_the_orbit_integral() {
    let (psi, frames) = frames(8);
    let spec = QuadratureSpec { step: 0.001, ..QuadratureSpec::default() };
    for v in &frames {
        for t in [-3.0, 0.7, 4.0] {
            let sigma = reparam_time(&psi, v, t).unwrap();
            let oracle = rk4_time(&psi, v, t, 8000);
            assert!((sigma - oracle).abs() < 1e-9, "{sigma} vs {oracle}");
            let back = orbit_integral(&psi, v, sigma, &spec).unwrap();
            assert!((back - t).abs() < 1e-9, "{back} vs {t}");
        }
    }
}

#[test]
fn time_changed_flow_is_a_flow() {
    let (psi, frames) = frames(6);
    for v in &frames {
        let (s, t) = (1.3, -2.1);
        let two = reparam_flow(&psi, &reparam_flow(&psi, v, s).unwrap(), t).unwrap();
        let one = reparam_flow(&psi, v, s + t).unwrap();
        assert!(two.distance(&one) < 1e-9 * (1.0 + v.norm_sq()));
    }
}

#[test]
fn cocycles_are_leaf_derivatives_of_pair_integrals() {
    let (psi, frames) = frames(6);
    let spec = QuadratureSpec { step: 0.002, ..QuadratureSpec::default() };
    let r = 1e-4;
    for u in &frames {
        let plus = (stable_pair(&psi, u, r, &spec).unwrap() - stable_pair(&psi, u, -r, &spec).unwrap()) / (2.0 * r);
        let minus = (unstable_pair(&psi, u, r, &spec).unwrap() - unstable_pair(&psi, u, -r, &spec).unwrap()) / (2.0 * r);
        let hp = parry_cocycle(&psi, u, Side::Plus, &spec).unwrap();
        let hm = parry_cocycle(&psi, u, Side::Minus, &spec).unwrap();
        assert!((plus - hp).abs() < 1e-6, "{plus} vs {hp}");
        assert!((minus + hm).abs() < 1e-6, "{minus} vs {hm}");
    }
}

#[test]
fn quadrilateral_last_corner_is_the_flowed_start() {
    let (_, frames) = frames(6);
    for v in &frames {
        for delta in [0.1, 0.02] {
            let quad = reparam_lab::reparam::Quadrilateral::new(v, delta).unwrap();
            let flowed = flow(v, Generator::Geodesic, quad.sides.d5).unwrap();
            assert!(quad.corners[3].distance(&flowed) < 1e-12);
            assert!(quad.closure_gap() < 1e-12);
        }
    }
}

#[test]
fn two_routes_agree() {
    let (psi, frames) = frames(6);
    for delta in [0.08, 0.02] {
        let spec = QuadratureSpec::for_delta(delta);
        for v in &frames {
            let a = h_delta(&psi, v, delta, &spec, Route::Integral).unwrap();
            let b = h_delta(&psi, v, delta, &spec, Route::CrossRatio).unwrap();
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn constant_observable_degenerates(c in 0.2..5.0f64, t in -5.0..5.0f64, delta in 0.01..0.2f64, quad in prop::array::uniform4(-3.0..3.0f64)) {
        let psi = InvariantObservable::constant(common::surface(), c).unwrap();
        let v = reparam_lab::fuchsian::frame_at(0.2, 0.9, 1.1);
        prop_assert!((reparam_time(&psi, &v, t).unwrap() - t / c).abs() < 1e-12 * (1.0 + t.abs()));
        let spec = QuadratureSpec::for_delta(delta);
        prop_assert_eq!(tau_delta(&psi, &v, delta, &spec).unwrap().total(), 0.0);
        let d5 = reparam_lab::lie::quadrilateral_close(delta, delta).unwrap().d5;
        let h = h_delta(&psi, &v, delta, &spec, Route::Integral).unwrap();
        prop_assert!((h - c * d5).abs() < 1e-12);
        prop_assume!((0..4).all(|i| (i + 1..4).all(|j| (quad[i] - quad[j]).abs() > 0.1)));
        let [a, b, x, y] = quad.map(Finite);
        let cr = cross_ratio_psi(&psi, a, b, x, y, &spec).unwrap();
        prop_assert!((cr - c * cross_ratio(a, b, x, y).unwrap()).abs() < 1e-9 * (1.0 + cr.abs()));
    }
}
