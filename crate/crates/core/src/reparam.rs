//! The time-changed flow generated by `Z/ψ` and the quantities built from it.
//!
//! Everything reduces to integrals of `ψ` along geodesic orbits. Two frames on
//! a common stable leaf satisfy `f^s(u·e^{rX+}) = f^s(u)·e^{r e^{-s} X+}`, and on
//! a common unstable leaf `f^s(u·e^{rX-}) = f^s(u)·e^{r e^{s} X-}`, so each
//! leaf-pair integral walks a single orbit and evaluates `ψ` at the walked
//! frame and at an exactly known nearby frame.

use crate::boundary::{self, frame_away_from, frame_on_geodesic, frame_toward, BasePoint, BoundaryPoint, Leaf};
use crate::error::{Error, Result};
use crate::fuchsian::{Derivative, Direction, InvariantObservable};
use crate::lie::{exp_unchecked, flow_unchecked, quadrilateral_close, quadrilateral_corners, Generator, GroupElement, Quintuple};
use crate::quadrature::{simpson_intervals, simpson_weight};

/// Truncation and step control for half-line orbit integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Upper bound on the node spacing of the composite Simpson rule.
    pub step: f64,
    /// Allowed size of the discarded tail of a half-line integral.
    pub tail_tol: f64,
    /// Largest truncation time before giving up.
    pub max_t: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { step: 0.01, tail_tol: 1e-10, max_t: 60.0 }
    }
}

impl QuadratureSpec {
    /// Spacing `min(0.01, δ/10)`.
    pub fn for_delta(delta: f64) -> Self {
        Self { step: 0.01f64.min(delta / 10.0), ..Self::default() }
    }

    pub fn with_tol(self, tail_tol: f64) -> Self {
        Self { tail_tol, ..self }
    }

    /// Smallest `T` with `‖ψ‖_{C¹}·|r|·e^{-T} ≤ tail_tol`.
    pub fn truncation_time(&self, r: f64, c1: f64) -> Result<f64> {
        let needed = (r.abs() * c1 / self.tail_tol).ln().max(1.0);
        if needed > self.max_t {
            return Err(Error::Tolerance { tol: self.tail_tol, needed, max: self.max_t });
        }
        Ok(needed)
    }
}

/// Reduced frames `f^{kh}(u)`, k = 0, 1, 2, …, produced by repeated right
/// multiplication and reduction.
pub struct OrbitWalker<'a> {
    psi: &'a InvariantObservable,
    current: GroupElement,
    h: f64,
    step: GroupElement,
}

impl<'a> OrbitWalker<'a> {
    pub fn new(psi: &'a InvariantObservable, u: &GroupElement, h: f64) -> Result<Self> {
        let current = psi.surface().domain.reduce_frame(u)?;
        Ok(Self { psi, current, h, step: exp_unchecked(Generator::Geodesic, h) })
    }

    pub fn current(&self) -> &GroupElement {
        &self.current
    }

    pub fn advance(&mut self) {
        self.advance_by(1);
    }

    pub fn advance_by(&mut self, k: usize) {
        let next = if k == 1 { self.current * self.step } else { self.current * exp_unchecked(Generator::Geodesic, self.h * k as f64) };
        self.current = self.psi.surface().domain.reduce_frame(&next).expect("reduction of a finite frame terminates");
    }
}

/// Composite Simpson sum `Σ w_k f(k, f^{kh} u)` over `k = 0..=n`, for an
/// integrand that vanishes wherever `ψ` is constant on the horocycle arc of
/// length `reach(k)` (non-increasing in `k`) through the walked frame.
/// Stretches of the orbit that stay clear of every bump are jumped over.
fn simpson_along_orbit(
    psi: &InvariantObservable,
    u: &GroupElement,
    h: f64,
    n: usize,
    reach: impl Fn(usize) -> f64,
    mut f: impl FnMut(usize, &GroupElement) -> f64,
) -> Result<f64> {
    let mut walker = OrbitWalker::new(psi, u, h)?;
    let mut total = 0.0;
    let mut k = 0;
    while k <= n {
        let free = psi.clearance_time(walker.current(), reach(k)) - 1e-9;
        // Nodes k..k+j-1 are reached after less than `free`.
        let j = if free > 0.0 { ((free / h.abs()).ceil() as usize).min(n - k) } else { 0 };
        if j >= 2 {
            walker.advance_by(j);
            k += j;
            continue;
        }
        total += simpson_weight(k, n, h.abs()) * f(k, walker.current());
        if k < n {
            walker.advance();
        }
        k += 1;
    }
    Ok(total)
}

/// `∫_0^t ψ(f^s u) ds`; negative `t` gives `-∫_t^0`.
pub fn orbit_integral(psi: &InvariantObservable, u: &GroupElement, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    if psi.is_constant() || t == 0.0 {
        return Ok(psi.base * t);
    }
    let n = simpson_intervals(t, spec.step);
    let h = t / n as f64;
    let bumps = simpson_along_orbit(psi, u, h, n, |_| 0.0, |_, g| psi.evaluate_reduced(g, Derivative::Value) - psi.base)?;
    Ok(psi.base * t + t.signum() * bumps)
}

/// Integral of `ψ(f^s(u·e^{rX})) − ψ(f^s u)` over `s ∈ [0, T]` for the
/// stable leaf, or over `s ∈ [-T, 0]` for the unstable leaf, with spacing
/// at most `h`.
pub fn leaf_pair_truncated(psi: &InvariantObservable, u: &GroupElement, leaf: Leaf, r: f64, t_max: f64, h: f64) -> Result<f64> {
    if psi.is_constant() || r == 0.0 {
        return Ok(0.0);
    }
    let n = simpson_intervals(t_max, h);
    let step = t_max / n as f64;
    // Both offsets shrink like e^{-|s|} along the walked half-line.
    let (dir, gen) = match leaf {
        Leaf::Stable => (step, Generator::Stable),
        Leaf::Unstable => (-step, Generator::Unstable),
    };
    let offset = |k: usize| r * (-step * k as f64).exp();
    simpson_along_orbit(
        psi,
        u,
        dir,
        n,
        |k| offset(k).abs(),
        |k, g| {
            let moved = flow_unchecked(g, gen, offset(k));
            psi.evaluate_near(&moved, Derivative::Value) - psi.evaluate_reduced(g, Derivative::Value)
        },
    )
}

/// `∫_0^∞ ψ(f^s(u·e^{rX+})) − ψ(f^s u) ds`.
pub fn stable_pair(psi: &InvariantObservable, u: &GroupElement, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    if psi.is_constant() || r == 0.0 {
        return Ok(0.0);
    }
    let t = spec.truncation_time(r, psi.c_norm(1))?;
    leaf_pair_truncated(psi, u, Leaf::Stable, r, t, spec.step)
}

/// `∫_{-∞}^0 ψ(f^s(u·e^{rX-})) − ψ(f^s u) ds`.
pub fn unstable_pair(psi: &InvariantObservable, u: &GroupElement, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    if psi.is_constant() || r == 0.0 {
        return Ok(0.0);
    }
    let t = spec.truncation_time(r, psi.c_norm(1))?;
    leaf_pair_truncated(psi, u, Leaf::Unstable, r, t, spec.step)
}

/// Which Parry cocycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `h+(v) = ∫_0^∞ e^{-t} (X+ψ)(f^t v) dt`.
    Plus,
    /// `h-(v) = -∫_0^∞ e^{-t} (X-ψ)(f^{-t} v) dt`.
    Minus,
}

/// Weighted orbit integral `∫_0^T e^{-kt} D(f^{±t} v) dt` for a derivative `D`.
fn weighted_orbit(
    psi: &InvariantObservable,
    v: &GroupElement,
    forward: bool,
    decay: f64,
    der: Derivative,
    t_max: f64,
    h: f64,
) -> Result<f64> {
    let n = simpson_intervals(t_max, h);
    let step = t_max / n as f64;
    simpson_along_orbit(psi, v, if forward { step } else { -step }, n, |_| 0.0, |k, g| {
        (-decay * step * k as f64).exp() * psi.evaluate_reduced(g, der)
    })
}

fn cocycle_horizon(psi: &InvariantObservable, spec: &QuadratureSpec) -> Result<f64> {
    spec.truncation_time(1.0, psi.c_norm(1))
}

/// Parry cocycle at `v`.
pub fn parry_cocycle(psi: &InvariantObservable, v: &GroupElement, side: Side, spec: &QuadratureSpec) -> Result<f64> {
    if psi.is_constant() {
        return Ok(0.0);
    }
    let t = cocycle_horizon(psi, spec)?;
    match side {
        Side::Plus => weighted_orbit(psi, v, true, 1.0, Derivative::First(Direction::XPlus), t, spec.step),
        Side::Minus => Ok(-weighted_orbit(psi, v, false, 1.0, Derivative::First(Direction::XMinus), t, spec.step)?),
    }
}

/// Derivative of a Parry cocycle along a frame field, for the directions in
/// which it exists classically: the flow direction and the cocycle's own
/// horocycle direction. Returns `None` for the transverse horocycle.
pub fn parry_derivative(
    psi: &InvariantObservable,
    v: &GroupElement,
    side: Side,
    dir: Direction,
    spec: &QuadratureSpec,
) -> Result<Option<f64>> {
    if psi.is_constant() {
        return Ok(Some(0.0));
    }
    let t = cocycle_horizon(psi, spec)?;
    let (own, forward, sign) = match side {
        Side::Plus => (Direction::XPlus, true, 1.0),
        Side::Minus => (Direction::XMinus, false, -1.0),
    };
    let decay = match (dir, side) {
        (Direction::Z, _) => 1.0,
        (d, _) if d == own => 2.0,
        _ => return Ok(None),
    };
    // Moving v along Z shifts the orbit; moving along the own horocycle scales
    // the offset by e^{-t}, giving a second factor of e^{-t}.
    let val = weighted_orbit(psi, v, forward, decay, Derivative::Second(dir, own), t, spec.step)?;
    Ok(Some(sign * val))
}

/// Dormand–Prince 5(4): fifth-order weights and the error weights `b5 − b4`.
const DP_B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Geodesic time `σ(t)` reached by the time-changed flow from `v` after time
/// `t`: `dσ/dτ = 1/ψ(f^σ v)`, `σ(0) = 0`.
pub fn reparam_time(psi: &InvariantObservable, v: &GroupElement, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain("time"));
    }
    if psi.is_constant() {
        return Ok(t / psi.base);
    }
    let v0 = psi.surface().domain.reduce_frame(v)?;
    let rate = |sigma: f64| 1.0 / psi.evaluate_near(&flow_unchecked(&v0, Generator::Geodesic, sigma), Derivative::Value);
    let tol = 1e-13;
    let dir = t.signum();
    let mut tau = 0.0;
    let mut sigma = 0.0;
    // Where ψ is constant the error estimate vanishes, so the step is capped
    // to keep it from jumping over a bump.
    let h_max = psi.bumps.iter().filter(|b| b.amplitude != 0.0).map(|b| 0.1 * b.radius).fold(0.05, f64::min) * psi.lower_bound();
    let mut h = h_max * dir;
    let mut k1 = rate(sigma);
    while (t - tau) * dir > 0.0 {
        if (tau + h - t) * dir > 0.0 {
            h = t - tau;
        }
        // The right-hand side depends only on σ, not on τ.
        let a = [
            [0.0; 6],
            [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
            [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
            [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
            [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
            [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        ];
        let mut k = [0.0; 7];
        k[0] = k1;
        for i in 1..6 {
            let y = sigma + h * (0..i).map(|j| a[i][j] * k[j]).sum::<f64>();
            k[i] = rate(y);
        }
        let y5 = sigma + h * (0..7).map(|j| DP_B[j] * k[j]).sum::<f64>();
        k[6] = rate(y5);
        let err = (h * (0..7).map(|j| DP_E[j] * k[j]).sum::<f64>()).abs();
        let scale = tol * (1.0 + y5.abs());
        if err <= scale {
            tau += h;
            sigma = y5;
            k1 = k[6];
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * (scale / err).powf(0.2)).clamp(0.2, 5.0) };
        if err > scale && (h * factor).abs() < 1e-12 {
            return Err(Error::Stiff);
        }
        h = (h * factor).clamp(-h_max, h_max);
    }
    Ok(sigma)
}

/// `f_ψ^t(v)`.
pub fn reparam_flow(psi: &InvariantObservable, v: &GroupElement, t: f64) -> Result<GroupElement> {
    Ok(flow_unchecked(v, Generator::Geodesic, reparam_time(psi, v, t)?))
}

/// Time-changed Busemann function at `ξ` for the stable direction,
/// normalized at `p`:
/// `∫_0^∞ ψ(f^s w) − ψ(f^{s−b} v) ds − ∫_0^{−b} ψ(f^s v) ds` with `b = b_p(q,ξ)`,
/// `v` the frame at `p` toward `ξ` and `w` the frame at `q` toward `ξ`.
pub fn busemann_psi(psi: &InvariantObservable, p: BasePoint, q: BasePoint, xi: BoundaryPoint, spec: &QuadratureSpec) -> Result<f64> {
    let b = boundary::busemann(p, q, xi)?;
    if psi.is_constant() {
        return Ok(psi.base * b);
    }
    let v = frame_toward(p, xi)?;
    let w = frame_toward(q, xi)?;
    let u = flow_unchecked(&v, Generator::Geodesic, -b);
    let r = boundary::leaf_offset(&u, w.endpoints().0, Leaf::Stable)?;
    Ok(stable_pair(psi, &u, r, spec)? - orbit_integral(psi, &v, -b, spec)?)
}

/// Time-changed Busemann function at `ξ` for the unstable direction: time
/// measured along orbits leaving `ξ`, zero at the frame at `p` pointing away
/// from `ξ`. Evaluated at the frame at `q` pointing away from `ξ`.
pub fn busemann_psi_unstable(
    psi: &InvariantObservable,
    p: BasePoint,
    q: BasePoint,
    xi: BoundaryPoint,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let b = boundary::busemann(p, q, xi)?;
    if psi.is_constant() {
        return Ok(psi.base * b);
    }
    let v = frame_away_from(p, xi)?;
    let w = frame_away_from(q, xi)?;
    let u = flow_unchecked(&v, Generator::Geodesic, b);
    let r = boundary::leaf_offset(&u, w.endpoints().1, Leaf::Unstable)?;
    Ok(orbit_integral(psi, &v, b, spec)? + unstable_pair(psi, &u, r, spec)?)
}

/// Point of the geodesic `x → y` closest to `p`.
pub fn projection(p: BasePoint, x: BoundaryPoint, y: BoundaryPoint) -> Result<BasePoint> {
    let g = frame_on_geodesic(x, y)?;
    let local = g.inverse().act_point(p);
    let height = (local.x * local.x + local.y * local.y).sqrt();
    Ok(g.act_point(BasePoint { x: 0.0, y: height }))
}

/// Signed time-changed Gromov sum for the oriented geodesic `x → y`: the
/// unstable Busemann function of `x` plus the stable one of `y`, both at a
/// frame on the geodesic. With `ψ ≡ 1` this is [`boundary::gromov_raw`].
pub fn gromov_psi_raw(psi: &InvariantObservable, p: BasePoint, x: BoundaryPoint, y: BoundaryPoint, spec: &QuadratureSpec) -> Result<f64> {
    let q = projection(p, x, y)?;
    gromov_psi_raw_at(psi, p, q, x, y, spec)
}

pub fn gromov_psi_raw_at(
    psi: &InvariantObservable,
    p: BasePoint,
    q: BasePoint,
    x: BoundaryPoint,
    y: BoundaryPoint,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(busemann_psi_unstable(psi, p, q, x, spec)? + busemann_psi(psi, p, q, y, spec)?)
}

/// Time-changed cross ratio, normalized so that `ψ ≡ 1` gives
/// [`boundary::cross_ratio`]. Gromov sums are taken from `p`.
pub fn cross_ratio_psi_at(
    psi: &InvariantObservable,
    p: BasePoint,
    xi: BoundaryPoint,
    xi2: BoundaryPoint,
    eta: BoundaryPoint,
    eta2: BoundaryPoint,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if xi == xi2 || eta == eta2 {
        for (a, b) in [(xi, eta), (xi, eta2), (xi2, eta), (xi2, eta2)] {
            boundary::geodesic_apex(a, b)?;
        }
        return Ok(0.0);
    }
    let g = |a, b| gromov_psi_raw(psi, p, a, b, spec);
    Ok(-((g(xi, eta2)? + g(xi2, eta)?) - (g(xi, eta)? + g(xi2, eta2)?)))
}

pub fn cross_ratio_psi(
    psi: &InvariantObservable,
    xi: BoundaryPoint,
    xi2: BoundaryPoint,
    eta: BoundaryPoint,
    eta2: BoundaryPoint,
    spec: &QuadratureSpec,
) -> Result<f64> {
    cross_ratio_psi_at(psi, BasePoint::I, xi, xi2, eta, eta2, spec)
}

/// Moves from `u` to the time-changed stable (or unstable) leaf of `u` on
/// the geodesic with the given other endpoint.
pub fn psi_leaf_intersection(
    psi: &InvariantObservable,
    u: &GroupElement,
    other_end: BoundaryPoint,
    leaf: Leaf,
    spec: &QuadratureSpec,
) -> Result<GroupElement> {
    let r = boundary::leaf_offset(u, other_end, leaf)?;
    let w = boundary::leaf_intersection(u, other_end, leaf)?;
    // Time-changed duration from w to the partner of u on w's orbit.
    let shift = match leaf {
        Leaf::Stable => stable_pair(psi, u, r, spec)?,
        Leaf::Unstable => -unstable_pair(psi, u, r, spec)?,
    };
    reparam_flow(psi, &w, shift)
}

/// Outcome of the time-changed holonomy circuit.
#[derive(Debug, Clone, Copy)]
pub struct PsiCircuit {
    /// Time-changed duration from the start to the end of the circuit.
    pub time: f64,
    /// Geodesic duration of the same displacement.
    pub geodesic_time: f64,
    pub residual: f64,
}

/// Same circuit as [`boundary::holonomy_circuit`] along the leaves of the
/// time-changed flow. Its duration equals
/// `-cross_ratio_psi(ξ, ξ', η, η')`.
pub fn psi_circuit(
    psi: &InvariantObservable,
    xi: BoundaryPoint,
    xi2: BoundaryPoint,
    eta: BoundaryPoint,
    eta2: BoundaryPoint,
    start: Option<GroupElement>,
    spec: &QuadratureSpec,
) -> Result<PsiCircuit> {
    let v1 = match start {
        Some(v) => v,
        None => frame_on_geodesic(xi, eta)?,
    };
    let v2 = psi_leaf_intersection(psi, &v1, xi2, Leaf::Stable, spec)?;
    let v3 = psi_leaf_intersection(psi, &v2, eta2, Leaf::Unstable, spec)?;
    let v4 = psi_leaf_intersection(psi, &v3, xi, Leaf::Stable, spec)?;
    let v5 = psi_leaf_intersection(psi, &v4, eta, Leaf::Unstable, spec)?;
    let (geodesic_time, residual) = boundary::time_along_orbit(&v1, &v5);
    let time = orbit_integral(psi, &v1, geodesic_time, spec)?;
    Ok(PsiCircuit { time, geodesic_time, residual })
}

/// A closing quadrilateral `v, v1, v2, v3, v4 = f^{δ5} v` from the exact quintuple.
#[derive(Debug, Clone, Copy)]
pub struct Quadrilateral {
    pub v: GroupElement,
    pub corners: [GroupElement; 4],
    pub delta: f64,
    pub sides: Quintuple,
}

impl Quadrilateral {
    pub fn new(v: &GroupElement, delta: f64) -> Result<Self> {
        let sides = quadrilateral_close(delta, delta)?;
        Ok(Self { v: *v, corners: quadrilateral_corners(v, &sides), delta, sides })
    }

    /// Gap between the last corner and `f^{δ5} v`.
    pub fn closure_gap(&self) -> f64 {
        self.corners[3].distance(&flow_unchecked(&self.v, Generator::Geodesic, self.sides.d5))
    }
}

/// The four leaf integrals of a quadrilateral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauParts {
    /// Stable-leaf part: pairs `(v1, v2)` and `(v3, v4)`.
    pub plus: f64,
    /// Unstable-leaf part: pairs `(v, v1)` and `(v2, v3)`.
    pub minus: f64,
}

impl TauParts {
    pub fn total(&self) -> f64 {
        self.plus + self.minus
    }
}

fn tau_parts_with(psi: &InvariantObservable, quad: &Quadrilateral, horizon: Option<f64>, spec: &QuadratureSpec) -> Result<TauParts> {
    let [v1, v2, v3, v4] = quad.corners;
    let s = quad.sides;
    let stable = |u: &GroupElement, r: f64| match horizon {
        Some(t) => leaf_pair_truncated(psi, u, Leaf::Stable, r, t, spec.step),
        None => stable_pair(psi, u, r, spec),
    };
    let unstable = |u: &GroupElement, r: f64| match horizon {
        Some(t) => leaf_pair_truncated(psi, u, Leaf::Unstable, r, t, spec.step),
        None => unstable_pair(psi, u, r, spec),
    };
    // v4 = v3·e^{d4 X+}; checked against f^{d5} v by Quadrilateral::closure_gap.
    let _ = v4;
    let plus = stable(&v1, s.d2)? + stable(&v3, s.d4)?;
    let minus = -unstable(&quad.v, s.d1)? - unstable(&v2, s.d3)?;
    Ok(TauParts { plus, minus })
}

/// `τ_δ(v)` with tolerance-driven truncation.
pub fn tau_delta(psi: &InvariantObservable, v: &GroupElement, delta: f64, spec: &QuadratureSpec) -> Result<TauParts> {
    tau_parts_with(psi, &Quadrilateral::new(v, delta)?, None, spec)
}

/// `τ_δ(v)` with every half-line cut at `T_δ = log δ⁻²`.
pub fn tau_delta_truncated(psi: &InvariantObservable, v: &GroupElement, delta: f64, spec: &QuadratureSpec) -> Result<TauParts> {
    let horizon = (delta * delta).recip().ln();
    tau_parts_with(psi, &Quadrilateral::new(v, delta)?, Some(horizon), spec)
}

/// How to compute `h_δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Leaf integrals plus the flow integral over the closing side.
    Integral,
    /// Time-changed cross ratio of the quadrilateral's boundary points.
    CrossRatio,
}

/// Temporal distance of the δ-quadrilateral at `v`.
pub fn h_delta(psi: &InvariantObservable, v: &GroupElement, delta: f64, spec: &QuadratureSpec, route: Route) -> Result<f64> {
    let lifted = psi.surface().domain.reduce_frame(v)?;
    let quad = Quadrilateral::new(&lifted, delta)?;
    match route {
        Route::Integral => {
            let tau = tau_parts_with(psi, &quad, None, spec)?.total();
            Ok(tau + orbit_integral(psi, &lifted, quad.sides.d5, spec)?)
        }
        Route::CrossRatio => {
            let (vm, vp) = lifted.endpoints();
            let (v2m, v2p) = quad.corners[1].endpoints();
            cross_ratio_psi_at(psi, lifted.base_point(), vm, v2m, vp, v2p, spec)
        }
    }
}
