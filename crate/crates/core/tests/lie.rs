//! Group and algebra identities against independent matrix computations.

use proptest::prelude::*;
use reparam_lab::lie::{
    adjoint, exp_generator, flow, holonomy_closure_check, matrix_commutator, pushforward, quadrilateral_close, AlgebraVector,
    Generator, GroupElement,
};

/// Matrix exponential by a truncated Taylor series with scaling and squaring.
fn expm(m: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mul = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
        let mut c = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    };
    let squarings = 8;
    let s = 0.5f64.powi(squarings);
    let a = [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]];
    let mut sum = [[1.0, 0.0], [0.0, 1.0]];
    let mut term = sum;
    for k in 1..20 {
        term = mul(term, a);
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x /= k as f64;
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = mul(sum, sum);
    }
    sum
}

fn element(m: [[f64; 2]; 2]) -> GroupElement {
    GroupElement::new(m[0][0], m[0][1], m[1][0], m[1][1]).unwrap()
}

fn arb_element() -> impl Strategy<Value = GroupElement> {
    (-1.5..1.5f64, -1.5..1.5f64, -1.5..1.5f64).prop_map(|(a, b, c)| {
        let x = AlgebraVector::new(a, b, c);
        element(expm(x.to_matrix()))
    })
}

fn arb_vector() -> impl Strategy<Value = AlgebraVector> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b, c)| AlgebraVector::new(a, b, c))
}

#[test]
fn closed_form_exponentials_match_series() {
    for kind in [Generator::Geodesic, Generator::Stable, Generator::Unstable] {
        for r in [-2.5, -0.3, 0.0, 0.7, 3.1] {
            let series = element(expm(kind.algebra().scale(r).to_matrix()));
            let closed = exp_generator(kind, r).unwrap();
            assert!(closed.distance(&series) < 1e-12, "{} at {r}", kind.name());
        }
    }
    assert!(exp_generator(Generator::Stable, f64::NAN).is_err());
}

#[test]
fn structure_constants() {
    let (m, z, p) = (AlgebraVector::X_MINUS, AlgebraVector::Z, AlgebraVector::X_PLUS);
    assert_eq!(z.bracket(&p), p.scale(2.0));
    assert_eq!(z.bracket(&m), m.scale(-2.0));
    assert_eq!(p.bracket(&m), z);
}

#[test]
fn quadrilateral_closes_exactly() {
    let w = exp_generator(Generator::Stable, 0.4).unwrap() * exp_generator(Generator::Geodesic, -1.2).unwrap();
    for (d1, d2) in [(0.1, 0.1), (0.3, -0.2), (-0.5, 0.9)] {
        let q = quadrilateral_close(d1, d2).unwrap();
        assert!(holonomy_closure_check(&w, &q) < 1e-13);
        assert!(q.d5 < 0.0 || d1 * d2 < 0.0);
    }
    assert!(quadrilateral_close(1.0, -1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bracket_is_the_matrix_commutator(x in arb_vector(), y in arb_vector()) {
        let b = x.bracket(&y);
        let c = matrix_commutator(&x, &y);
        prop_assert!(b.add(&c.scale(-1.0)).norm() < 1e-12 * (1.0 + x.norm() * y.norm()));
    }

    #[test]
    fn jacobi_identity(x in arb_vector(), y in arb_vector(), z in arb_vector()) {
        let j = x.bracket(&y.bracket(&z)).add(&y.bracket(&z.bracket(&x))).add(&z.bracket(&x.bracket(&y)));
        prop_assert!(j.norm() < 1e-10);
    }

    #[test]
    fn group_axioms(g in arb_element(), h in arb_element(), k in arb_element()) {
        prop_assert!(((g * h) * k).distance(&(g * (h * k))) < 1e-10);
        prop_assert!((g * g.inverse()).distance(&GroupElement::IDENTITY) < 1e-10);
        prop_assert!(((g * h).det() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn flows_are_one_parameter_groups(g in arb_element(), s in -2.0..2.0f64, t in -2.0..2.0f64) {
        for kind in [Generator::Geodesic, Generator::Stable, Generator::Unstable] {
            let two_steps = flow(&flow(&g, kind, s).unwrap(), kind, t).unwrap();
            prop_assert!(two_steps.distance(&flow(&g, kind, s + t).unwrap()) < 1e-10 * (1.0 + g.norm_sq()));
        }
    }

    #[test]
    fn adjoint_matches_exponential_conjugation(x in arb_vector(), t in -2.0..2.0f64) {
        // Ad(e^{-tZ/2}) X is the derivative of f^{-t} e^{sX} f^{t} at s = 0.
        let p = pushforward(t, &x);
        let g = exp_generator(Generator::Geodesic, -t).unwrap();
        let s = 1e-6;
        let conj = g * element(expm(x.scale(s).to_matrix())) * g.inverse();
        let [a, b, c, d] = conj.entries();
        let fd = AlgebraVector::from_matrix([[(a - 1.0) / s, b / s], [c / s, (d - 1.0) / s]]);
        prop_assert!(p.add(&fd.scale(-1.0)).norm() < 1e-4 * (1.0 + x.norm() * (t.abs()).exp()));
        prop_assert!(adjoint(&g, &x).add(&p.scale(-1.0)).norm() < 1e-12 * (1.0 + p.norm()));
    }

    #[test]
    fn stable_and_unstable_rates_are_one(t in -3.0..3.0f64) {
        let p = pushforward(t, &AlgebraVector::X_PLUS);
        let m = pushforward(t, &AlgebraVector::X_MINUS);
        prop_assert!((p.c_plus - (-t).exp()).abs() < 1e-12 * (1.0 + t.abs().exp()));
        prop_assert!((m.c_minus - t.exp()).abs() < 1e-12 * (1.0 + t.abs().exp()));
    }
}
