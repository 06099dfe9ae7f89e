//! Boundary quantities against limits of distances and the classical
//! logarithmic cross ratio.

use proptest::prelude::*;
use reparam_lab::boundary::{
    axis, busemann, cross_ratio, cross_ratio_at, gromov_product, gromov_raw, holonomy_circuit, hyperbolic_distance, BasePoint,
    BoundaryPoint,
};
use reparam_lab::lie::{exp_generator, Generator, GroupElement};

use BoundaryPoint::{Finite, Infinity};

/// `2 log(|ξ-η||ξ'-η'| / (|ξ-η'||ξ'-η|))` with factors involving `∞` dropped.
fn classical_cross_ratio(xi: f64, xi2: f64, eta: f64, eta2: f64) -> f64 {
    2.0 * ((xi - eta).abs() * (xi2 - eta2).abs() / ((xi - eta2).abs() * (xi2 - eta).abs())).ln()
}

fn mobius(a: f64, b: f64, c: f64) -> GroupElement {
    exp_generator(Generator::Stable, a).unwrap()
        * exp_generator(Generator::Geodesic, b).unwrap()
        * exp_generator(Generator::Unstable, c).unwrap()
}

fn arb_point() -> impl Strategy<Value = BasePoint> {
    (-2.0..2.0f64, 0.2..3.0f64).prop_map(|(x, y)| BasePoint::new(x, y).unwrap())
}

/// Four boundary points in cyclic order `ξ < η < ξ' < η'` (or rotated).
fn arb_quadruple() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-4.0..4.0f64).prop_filter("separated", |p| {
        (0..4).all(|i| (i + 1..4).all(|j| (p[i] - p[j]).abs() > 0.1))
    })
}

#[test]
fn busemann_is_a_limit_of_distance_differences() {
    let p = BasePoint::new(0.3, 0.8).unwrap();
    let q = BasePoint::new(-0.7, 1.9).unwrap();
    let far_up = BasePoint::new(0.0, 1e7).unwrap();
    let limit = hyperbolic_distance(q, far_up) - hyperbolic_distance(p, far_up);
    assert!((busemann(p, q, Infinity).unwrap() - limit).abs() < 1e-6);
    for x in [-1.3, 0.0, 2.5] {
        let near = BasePoint::new(x, 1e-7).unwrap();
        let limit = hyperbolic_distance(q, near) - hyperbolic_distance(p, near);
        assert!((busemann(p, q, Finite(x)).unwrap() - limit).abs() < 1e-6, "{x}");
    }
}

#[test]
fn gromov_worked_examples() {
    assert!(gromov_product(BasePoint::I, Finite(0.0), Infinity).unwrap().abs() < 1e-15);
    assert!(gromov_product(BasePoint::I, Finite(-1.0), Finite(1.0)).unwrap().abs() < 1e-15);
    assert!((gromov_product(BasePoint::I, Infinity, Finite(1.0)).unwrap() - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn axis_recovers_fixed_points_and_length() {
    let g = mobius(0.4, 2.2, -0.3);
    let (back, fwd, len) = axis(&g).unwrap();
    for x in [back, fwd] {
        assert!(g.act(x).chordal_distance(&x) < 1e-12);
    }
    assert!((2.0 * (0.5 * g.trace().abs()).acosh() - len).abs() < 1e-12);
    // Iterates of any other point go to the forward endpoint.
    let mut z = Finite(0.123);
    for _ in 0..30 {
        z = g.act(z);
    }
    assert!(z.chordal_distance(&fwd) < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cross_ratio_matches_logarithmic_formula(p in arb_quadruple()) {
        let [a, b, c, d] = p;
        let cr = cross_ratio(Finite(a), Finite(b), Finite(c), Finite(d)).unwrap();
        let classical = classical_cross_ratio(a, b, c, d);
        prop_assert!((cr - classical).abs() < 1e-10 * (1.0 + classical.abs()), "{cr} vs {classical}");
    }

    #[test]
    fn cross_ratio_symmetries(p in arb_quadruple(), e in -4.0..4.0f64) {
        let [a, b, c, d] = p.map(Finite);
        let cr = cross_ratio(a, b, c, d).unwrap();
        prop_assert!((cr + cross_ratio(b, a, c, d).unwrap()).abs() < 1e-10);
        prop_assert!((cr + cross_ratio(a, b, d, c).unwrap()).abs() < 1e-10);
        prop_assert!((cr - cross_ratio(c, d, a, b).unwrap()).abs() < 1e-10);
        // Cocycle in the first pair.
        prop_assume!(p.iter().all(|x| (x - e).abs() > 0.1));
        let e = Finite(e);
        let lhs = cross_ratio(a, b, c, d).unwrap() + cross_ratio(b, e, c, d).unwrap();
        prop_assert!((lhs - cross_ratio(a, e, c, d).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn cross_ratio_is_invariant(p in arb_quadruple(), g in (-1.0..1.0f64, -2.0..2.0f64, -1.0..1.0f64), base in arb_point()) {
        let g = mobius(g.0, g.1, g.2);
        let [a, b, c, d] = p.map(Finite);
        let cr = cross_ratio(a, b, c, d).unwrap();
        let moved = cross_ratio(g.act(a), g.act(b), g.act(c), g.act(d)).unwrap();
        prop_assert!((cr - moved).abs() < 1e-8 * (1.0 + cr.abs()));
        let elsewhere = cross_ratio_at(base, a, b, c, d).unwrap();
        prop_assert!((cr - elsewhere).abs() < 1e-9 * (1.0 + cr.abs()));
    }

    #[test]
    fn busemann_cocycle_and_equivariance(p in arb_point(), q in arb_point(), r in arb_point(), x in -3.0..3.0f64, g in (-1.0..1.0f64, -2.0..2.0f64)) {
        let xi = Finite(x);
        let pq = busemann(p, q, xi).unwrap();
        let qr = busemann(q, r, xi).unwrap();
        prop_assert!((pq + qr - busemann(p, r, xi).unwrap()).abs() < 1e-10);
        prop_assert!(pq.abs() <= hyperbolic_distance(p, q) + 1e-10);
        let g = mobius(g.0, g.1, 0.0);
        let moved = busemann(g.act_point(p), g.act_point(q), g.act(xi)).unwrap();
        prop_assert!((pq - moved).abs() < 1e-9);
    }

    #[test]
    fn base_change_holds_for_the_raw_sum(p in arb_point(), q in arb_point(), x in -3.0..3.0f64, y in -3.0..3.0f64) {
        prop_assume!((x - y).abs() > 0.1);
        let (xi, eta) = (Finite(x), Finite(y));
        let change = busemann(p, q, xi).unwrap() + busemann(p, q, eta).unwrap();
        let raw = gromov_raw(p, xi, eta).unwrap() - gromov_raw(q, xi, eta).unwrap();
        prop_assert!((raw - change).abs() < 1e-10);
        // Raw sums are never positive, so with |·| the identity holds with
        // the opposite sign.
        let abs = gromov_product(p, xi, eta).unwrap() - gromov_product(q, xi, eta).unwrap();
        prop_assert!((abs + change).abs() < 1e-10);
    }

    #[test]
    fn circuit_time_is_minus_cross_ratio(p in arb_quadruple()) {
        let [a, b, c, d] = p.map(Finite);
        let circuit = holonomy_circuit(a, b, c, d, None).unwrap();
        let cr = cross_ratio(a, b, c, d).unwrap();
        prop_assert!(circuit.residual < 1e-8);
        prop_assert!((circuit.time + cr).abs() < 1e-8 * (1.0 + cr.abs()), "{} vs {}", circuit.time, cr);
    }
}
