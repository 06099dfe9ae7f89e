//! Frame forms: exterior derivatives against the invariant formula with
//! difference quotients and matrix commutators, and loop integrals against
//! quadrature, orientation and telescoping.

mod common;

use proptest::prelude::*;
use reparam_lab::boundary::Leaf;
use reparam_lab::experiments::probe_frames;
use reparam_lab::forms::{
    alpha_psi, contact_volume, contact_volume_fd, frame_coords, line_integral, line_integral_with, reeb_pairing, stokes_tiling,
    Coefficient, FrameOneForm, Rule, SegmentKind, SegmentPath,
};
use reparam_lab::fuchsian::frame_at;
use reparam_lab::lie::{flow, matrix_commutator, AlgebraVector, Generator, GroupElement};
use reparam_lab::reparam::QuadratureSpec;

const KINDS: [Generator; 3] = [Generator::Unstable, Generator::Geodesic, Generator::Stable];

fn frame_vectors() -> [AlgebraVector; 3] {
    KINDS.map(|k| k.algebra())
}

/// `dθ(E_i, E_j)` from `E_i θ(E_j) − E_j θ(E_i) − θ([E_i, E_j])`, with the
/// derivatives taken as centered differences along the flows.
fn exterior_derivative_oracle(psi: &reparam_lab::fuchsian::InvariantObservable, form: &FrameOneForm, v: &GroupElement) -> [[f64; 3]; 3] {
    let spec = QuadratureSpec::default();
    let e = frame_vectors();
    let h = 1e-5;
    let theta = |w: &GroupElement, x: &AlgebraVector| form.apply(psi, w, x, &spec).unwrap();
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let along = |k: usize, x: &AlgebraVector| {
                let f = flow(v, KINDS[k], h).unwrap();
                let b = flow(v, KINDS[k], -h).unwrap();
                (theta(&f, x) - theta(&b, x)) / (2.0 * h)
            };
            out[i][j] = along(i, &e[j]) - along(j, &e[i]) - theta(v, &matrix_commutator(&e[i], &e[j]));
        }
    }
    out
}

fn smooth_form(a: [f64; 6]) -> FrameOneForm {
    let c = |k: f64, p: f64| Coefficient::constant(k).add(&Coefficient::psi(p));
    FrameOneForm { minus: c(a[0], a[1]), zero: c(a[2], a[3]), plus: c(a[4], a[5]) }
}

#[test]
fn frame_coordinates_of_generators() {
    assert_eq!(frame_coords(&Generator::Unstable.algebra()), [1.0, 0.0, 0.0]);
    assert_eq!(frame_coords(&Generator::Geodesic.algebra()), [0.0, 1.0, 0.0]);
    assert_eq!(frame_coords(&Generator::Stable.algebra()), [0.0, 0.0, 1.0]);
}

#[test]
fn alpha_differential_is_minus_two_alpha_plus_wedge_alpha_minus() {
    let psi = common::psi();
    let v = frame_at(0.1, 1.1, 0.4);
    let d = FrameOneForm::ALPHA.exterior_derivative(&psi, &v, &QuadratureSpec::default()).unwrap();
    // (−2 α⁺∧α⁻)(X+, X-) = −2.
    assert_eq!(d[2][0], -2.0);
    assert_eq!(d[0][2], 2.0);
    assert_eq!(d[0][1], 0.0);
    assert_eq!(d[1][2], 0.0);
}

#[test]
fn contact_volume_matches_coordinate_differences() {
    let psi = common::psi();
    let spec = QuadratureSpec::default();
    for v in probe_frames(&psi, 4, 23).unwrap() {
        // Smooth coefficients only: α_ψ∧dα_ψ involves X-h+, which has no
        // pointwise meaning.
        for form in [FrameOneForm::ALPHA, smooth_form([0.2, 1.0, 0.5, 1.0, -0.3, 0.8]), smooth_form([0.0, 0.0, 0.0, 1.0, 0.0, 1.0])] {
            let exact = contact_volume(&psi, &form, &v, &spec).unwrap();
            let fd = contact_volume_fd(&psi, &form, &v, 1e-4, &spec).unwrap();
            assert!((exact - fd).abs() < 1e-5, "{exact} vs {fd}");
        }
        assert_eq!(reeb_pairing(&psi, &alpha_psi(), &v, &spec).unwrap(), psi.value(&v).unwrap());
    }
}

#[test]
fn cocycle_rule_matches_pointwise_quadrature() {
    let psi = common::psi();
    let spec = QuadratureSpec { step: 0.002, ..QuadratureSpec::default() };
    let form = alpha_psi();
    for v in probe_frames(&psi, 4, 29).unwrap() {
        let path = SegmentPath::from_steps(
            &psi,
            &v,
            &[(SegmentKind::Unstable, 0.15), (SegmentKind::Stable, -0.2), (SegmentKind::Flow, 0.3), (SegmentKind::Stable, 0.1)],
        )
        .unwrap();
        let closed_form = line_integral_with(&psi, &form, &path, Rule::Cocycle, &spec).unwrap();
        let quadrature = line_integral_with(&psi, &form, &path, Rule::Quadrature, &spec).unwrap();
        assert!((closed_form - quadrature).abs() < 1e-8, "{closed_form} vs {quadrature}");
        let back = line_integral(&psi, &form, &path.reversed(&psi).unwrap(), &spec).unwrap();
        assert!((closed_form + back).abs() < 1e-12);
    }
}

#[test]
fn time_changed_orbits_have_unit_alpha_psi_speed() {
    let psi = common::psi();
    let spec = QuadratureSpec::default();
    let v = probe_frames(&psi, 2, 31).unwrap()[1];
    let path = SegmentPath::from_steps(&psi, &v, &[(SegmentKind::PsiFlow, 2.5)]).unwrap();
    let val = line_integral_with(&psi, &alpha_psi(), &path, Rule::Quadrature, &spec).unwrap();
    assert!((val - 2.5).abs() < 1e-9, "{val}");
    let flat = SegmentPath::from_steps(&psi, &v, &[(SegmentKind::Flow, 1.5)]).unwrap();
    assert_eq!(line_integral(&psi, &FrameOneForm::ALPHA, &flat, &spec).unwrap(), 1.5);
}

#[test]
fn flow_tangent_loops_close() {
    let psi = common::psi();
    let v = frame_at(0.3, 1.2, 0.7);
    for leaf in [Leaf::Stable, Leaf::Unstable] {
        let path = SegmentPath::flow_tangent_loop(&psi, &v, leaf, 0.05, 0.3).unwrap();
        path.validate(&psi, true).unwrap();
    }
}

#[test]
fn tile_circulations_telescope() {
    let psi = common::psi();
    let spec = QuadratureSpec::for_delta(0.05);
    let v = frame_at(0.3, 1.2, 0.7);
    let t = stokes_tiling(&psi, &v, 0.1, 0.05, psi.exact_mean(), &spec).unwrap();
    assert_eq!(t.tiles, 4);
    assert!((t.tile_sum - t.boundary_psi).abs() < 1e-12, "{} vs {}", t.tile_sum, t.boundary_psi);
    // The α-circulation is the dα-area of the square, of order side².
    assert!(t.area.abs() > 1e-3 && t.area.abs() < 0.1, "{}", t.area);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exterior_derivative_matches_invariant_formula(
        coeffs in prop::array::uniform6(-2.0..2.0f64),
        x in -1.0..1.0f64, y in 0.5..2.0f64, th in 0.0..6.28f64,
    ) {
        let psi = common::psi();
        let v = frame_at(x, y, th);
        let form = smooth_form(coeffs);
        let exact = form.exterior_derivative(&psi, &v, &QuadratureSpec::default()).unwrap();
        let oracle = exterior_derivative_oracle(&psi, &form, &v);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((exact[i][j] - oracle[i][j]).abs() < 1e-6, "({i},{j}) {} vs {}", exact[i][j], oracle[i][j]);
            }
        }
    }
}
