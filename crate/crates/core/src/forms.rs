//! Frame 1-forms on SM and their loop integrals.
//!
//! Forms are written against the dual frame `(α⁻, α, α⁺)` of `(X-, Z, X+)`,
//! where `Z` is the unit-speed geodesic generator. Coefficients are linear
//! combinations of `1`, `ψ`, `h-` and `h+`, which covers `α`, `α±`, `α_ψ` and
//! their affine families. Exterior derivatives of `α_ψ` are never formed
//! pointwise except through [`cb_value`]; everything else goes through loops.

use crate::boundary::Leaf;
use crate::error::{Error, Result};
use crate::fuchsian::{Derivative, Direction, InvariantObservable};
use crate::lie::{adjoint, flow_unchecked, pushforward, AlgebraVector, Generator, GroupElement, Quintuple};
use crate::par;
use crate::quadrature::{gauss_legendre, integrate_with};
use crate::reparam::{
    orbit_integral, parry_cocycle, parry_derivative, reparam_time, stable_pair, unstable_pair, QuadratureSpec, Quadrilateral,
    Side,
};

/// Step of centered differences for coefficient derivatives without an
/// analytic formula.
pub const FD_STEP: f64 = 1e-4;

/// `constant + psi·ψ + h_minus·h- + h_plus·h+`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Coefficient {
    pub constant: f64,
    pub psi: f64,
    pub h_minus: f64,
    pub h_plus: f64,
}

impl Coefficient {
    pub const ZERO: Coefficient = Coefficient { constant: 0.0, psi: 0.0, h_minus: 0.0, h_plus: 0.0 };

    pub const fn constant(c: f64) -> Self {
        Coefficient { constant: c, psi: 0.0, h_minus: 0.0, h_plus: 0.0 }
    }

    pub const fn psi(k: f64) -> Self {
        Coefficient { constant: 0.0, psi: k, h_minus: 0.0, h_plus: 0.0 }
    }

    pub const fn cocycle(side: Side, k: f64) -> Self {
        match side {
            Side::Minus => Coefficient { constant: 0.0, psi: 0.0, h_minus: k, h_plus: 0.0 },
            Side::Plus => Coefficient { constant: 0.0, psi: 0.0, h_minus: 0.0, h_plus: k },
        }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { constant: k * self.constant, psi: k * self.psi, h_minus: k * self.h_minus, h_plus: k * self.h_plus }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            constant: self.constant + o.constant,
            psi: self.psi + o.psi,
            h_minus: self.h_minus + o.h_minus,
            h_plus: self.h_plus + o.h_plus,
        }
    }

    /// Same coefficient with the cocycle parts removed.
    fn smooth_part(&self) -> Self {
        Self { h_minus: 0.0, h_plus: 0.0, ..*self }
    }

    pub fn value(&self, psi: &InvariantObservable, v: &GroupElement, spec: &QuadratureSpec) -> Result<f64> {
        let mut out = self.constant;
        if self.psi != 0.0 {
            out += self.psi * psi.value(v)?;
        }
        if self.h_minus != 0.0 {
            out += self.h_minus * parry_cocycle(psi, v, Side::Minus, spec)?;
        }
        if self.h_plus != 0.0 {
            out += self.h_plus * parry_cocycle(psi, v, Side::Plus, spec)?;
        }
        Ok(out)
    }

    /// Derivative along a frame field. Analytic for `ψ` and for the cocycles
    /// along `Z` and their own horocycle; Richardson-extrapolated centered
    /// differences otherwise.
    pub fn derivative(&self, psi: &InvariantObservable, v: &GroupElement, dir: Direction, spec: &QuadratureSpec) -> Result<f64> {
        let mut out = 0.0;
        if self.psi != 0.0 {
            out += self.psi * psi.evaluate(v, Derivative::First(dir))?;
        }
        for (k, side) in [(self.h_minus, Side::Minus), (self.h_plus, Side::Plus)] {
            if k == 0.0 {
                continue;
            }
            let d = match parry_derivative(psi, v, side, dir, spec)? {
                Some(d) => d,
                None => {
                    let f = |s: f64| parry_cocycle(psi, &flow_unchecked(v, generator(dir), s), side, spec);
                    richardson(f, FD_STEP)?
                }
            };
            out += k * d;
        }
        Ok(out)
    }
}

fn generator(dir: Direction) -> Generator {
    match dir {
        Direction::XMinus => Generator::Unstable,
        Direction::Z => Generator::Geodesic,
        Direction::XPlus => Generator::Stable,
    }
}

/// `(4 D(h/2) − D(h)) / 3` with `D` the centered difference.
fn richardson(f: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(h)? - f(-h)?) / (2.0 * h)) };
    Ok((4.0 * d(0.5 * h)? - d(h)?) / 3.0)
}

/// Coordinates of an algebra vector in the frame `(X-, Z, X+)`.
pub fn frame_coords(x: &AlgebraVector) -> [f64; 3] {
    [x.c_minus, 2.0 * x.c_z, x.c_plus]
}

/// `[E_i, E_j]` in frame coordinates for `E = (X-, Z, X+)`.
fn bracket(i: usize, j: usize) -> [f64; 3] {
    match (i, j) {
        (1, 2) => [0.0, 0.0, 1.0],
        (2, 1) => [0.0, 0.0, -1.0],
        (1, 0) => [-1.0, 0.0, 0.0],
        (0, 1) => [1.0, 0.0, 0.0],
        (2, 0) => [0.0, 2.0, 0.0],
        (0, 2) => [0.0, -2.0, 0.0],
        _ => [0.0; 3],
    }
}

/// A 1-form `minus·α⁻ + zero·α + plus·α⁺`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameOneForm {
    pub minus: Coefficient,
    pub zero: Coefficient,
    pub plus: Coefficient,
}

impl FrameOneForm {
    /// The canonical contact form, dual to `Z`.
    pub const ALPHA: FrameOneForm =
        FrameOneForm { minus: Coefficient::ZERO, zero: Coefficient::constant(1.0), plus: Coefficient::ZERO };
    pub const ALPHA_PLUS: FrameOneForm =
        FrameOneForm { minus: Coefficient::ZERO, zero: Coefficient::ZERO, plus: Coefficient::constant(1.0) };
    pub const ALPHA_MINUS: FrameOneForm =
        FrameOneForm { minus: Coefficient::constant(1.0), zero: Coefficient::ZERO, plus: Coefficient::ZERO };

    fn slots(&self) -> [Coefficient; 3] {
        [self.minus, self.zero, self.plus]
    }

    fn from_slots(s: [Coefficient; 3]) -> Self {
        Self { minus: s[0], zero: s[1], plus: s[2] }
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_slots(self.slots().map(|c| c.scale(k)))
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = (self.slots(), o.slots());
        Self::from_slots([a[0].add(&b[0]), a[1].add(&b[1]), a[2].add(&b[2])])
    }

    /// `c·self + b·other`.
    pub fn affine(&self, c: f64, other: &Self, b: f64) -> Self {
        self.scale(c).add(&other.scale(b))
    }

    /// Coefficient values at `v`.
    pub fn values(&self, psi: &InvariantObservable, v: &GroupElement, spec: &QuadratureSpec) -> Result<[f64; 3]> {
        let s = self.slots();
        Ok([s[0].value(psi, v, spec)?, s[1].value(psi, v, spec)?, s[2].value(psi, v, spec)?])
    }

    /// The form at `v` applied to a tangent vector given in the frame.
    pub fn apply(&self, psi: &InvariantObservable, v: &GroupElement, x: &AlgebraVector, spec: &QuadratureSpec) -> Result<f64> {
        let c = frame_coords(x);
        let a = self.values(psi, v, spec)?;
        Ok(a[0] * c[0] + a[1] * c[1] + a[2] * c[2])
    }

    /// `dθ(E_i, E_j)` for all frame pairs, from
    /// `dθ(X,Y) = Xθ(Y) − Yθ(X) − θ([X,Y])`.
    pub fn exterior_derivative(&self, psi: &InvariantObservable, v: &GroupElement, spec: &QuadratureSpec) -> Result<[[f64; 3]; 3]> {
        let a = self.values(psi, v, spec)?;
        let slots = self.slots();
        let mut da = [[0.0; 3]; 3];
        for (i, dir) in Direction::ALL.into_iter().enumerate() {
            for j in 0..3 {
                if !slots[j].is_zero() && i != j {
                    da[i][j] = slots[j].derivative(psi, v, dir, spec)?;
                }
            }
        }
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let br = bracket(i, j);
                out[i][j] = da[i][j] - da[j][i] - (0..3).map(|k| a[k] * br[k]).sum::<f64>();
            }
        }
        Ok(out)
    }
}

/// `α_ψ = −h-·α⁻ + ψ·α − h+·α⁺`.
pub fn alpha_psi() -> FrameOneForm {
    FrameOneForm { minus: Coefficient::cocycle(Side::Minus, -1.0), zero: Coefficient::psi(1.0), plus: Coefficient::cocycle(Side::Plus, -1.0) }
}

/// `(θ∧ω)(X-, X+, Z)` for a 1-form with values `t` and a 2-form `w`, frame
/// indices `0 = X-, 1 = Z, 2 = X+`.
fn wedge_volume(t: &[f64; 3], w: &[[f64; 3]; 3]) -> f64 {
    let (m, z, p) = (0, 1, 2);
    t[m] * w[p][z] - t[p] * w[m][z] + t[z] * w[m][p]
}

/// `(α∧dβ + β∧dα)(X-, X+, Z)` at `v`.
pub fn cb_value(
    psi: &InvariantObservable,
    alpha: &FrameOneForm,
    beta: &FrameOneForm,
    v: &GroupElement,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let (a, b) = (alpha.values(psi, v, spec)?, beta.values(psi, v, spec)?);
    let (da, db) = (alpha.exterior_derivative(psi, v, spec)?, beta.exterior_derivative(psi, v, spec)?);
    Ok(wedge_volume(&a, &db) + wedge_volume(&b, &da))
}

/// `(θ∧dθ)(X-, X+, Z)` at `v`.
pub fn contact_volume(psi: &InvariantObservable, theta: &FrameOneForm, v: &GroupElement, spec: &QuadratureSpec) -> Result<f64> {
    Ok(wedge_volume(&theta.values(psi, v, spec)?, &theta.exterior_derivative(psi, v, spec)?))
}

/// The form evaluated on the geodesic generator.
pub fn reeb_pairing(psi: &InvariantObservable, form: &FrameOneForm, v: &GroupElement, spec: &QuadratureSpec) -> Result<f64> {
    form.zero.value(psi, v, spec)
}

/// Contact volume `(θ∧dθ)(X-, X+, Z)` at `v` computed without the
/// structure relations: pull `θ` back along
/// `(s, u, t) ↦ v·e^{sX-}·e^{uX+}·e^{tZ}` and differentiate the component
/// functions by centered differences.
pub fn contact_volume_fd(
    psi: &InvariantObservable,
    theta: &FrameOneForm,
    v: &GroupElement,
    h: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let comps = |x: [f64; 3]| -> Result<[f64; 3]> {
        let [s, u, t] = x;
        let a = flow_unchecked(v, Generator::Unstable, s);
        let b = flow_unchecked(&a, Generator::Stable, u);
        let p = flow_unchecked(&b, Generator::Geodesic, t);
        // Coordinate fields at p as left-invariant vectors.
        let zt = |y: AlgebraVector| pushforward(t, &y);
        let ds = zt(adjoint(&flow_unchecked(&GroupElement::IDENTITY, Generator::Stable, -u), &AlgebraVector::X_MINUS));
        let du = zt(AlgebraVector::X_PLUS);
        let dt = AlgebraVector::new(0.0, 0.5, 0.0);
        Ok([theta.apply(psi, &p, &ds, spec)?, theta.apply(psi, &p, &du, spec)?, theta.apply(psi, &p, &dt, spec)?])
    };
    let mut grad = [[0.0; 3]; 3];
    for i in 0..3 {
        let mut xp = [0.0; 3];
        let mut xm = [0.0; 3];
        xp[i] = h;
        xm[i] = -h;
        let (cp, cm) = (comps(xp)?, comps(xm)?);
        for j in 0..3 {
            grad[i][j] = (cp[j] - cm[j]) / (2.0 * h);
        }
    }
    let a = comps([0.0; 3])?;
    // dA(∂i, ∂j) = ∂i A_j − ∂j A_i; coordinate order (s, u, t) ↔ (X-, X+, Z).
    let d = |i: usize, j: usize| grad[i][j] - grad[j][i];
    Ok(a[0] * d(1, 2) - a[1] * d(0, 2) + a[2] * d(0, 1))
}

/// Kind of a frame-tangent path segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    /// Geodesic flow, unit speed.
    Flow,
    Stable,
    Unstable,
    /// The time-changed flow generated by `Z/ψ`.
    PsiFlow,
}

#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: GroupElement,
    pub duration: f64,
}

impl Segment {
    /// Geodesic-flow equivalent: a `PsiFlow` segment covers the orbit arc of
    /// geodesic length `σ(duration)`.
    fn end(&self, psi: &InvariantObservable) -> Result<GroupElement> {
        Ok(match self.kind {
            SegmentKind::Flow => flow_unchecked(&self.start, Generator::Geodesic, self.duration),
            SegmentKind::Stable => flow_unchecked(&self.start, Generator::Stable, self.duration),
            SegmentKind::Unstable => flow_unchecked(&self.start, Generator::Unstable, self.duration),
            SegmentKind::PsiFlow => {
                flow_unchecked(&self.start, Generator::Geodesic, reparam_time(psi, &self.start, self.duration)?)
            }
        })
    }
}

/// Largest endpoint mismatch between consecutive segments.
pub const PATH_GAP: f64 = 1e-11;
/// Largest mismatch between the end and the start of a closed path.
pub const CLOSURE_GAP: f64 = 1e-10;

/// A concatenation of frame-tangent segments.
#[derive(Debug, Clone, Default)]
pub struct SegmentPath {
    pub segments: Vec<Segment>,
}

impl SegmentPath {
    /// Builds the path from `start` by following `(kind, duration)` steps.
    pub fn from_steps(psi: &InvariantObservable, start: &GroupElement, steps: &[(SegmentKind, f64)]) -> Result<Self> {
        let mut segments = Vec::with_capacity(steps.len());
        let mut at = *start;
        for &(kind, duration) in steps {
            let seg = Segment { kind, start: at, duration };
            at = seg.end(psi)?;
            segments.push(seg);
        }
        Ok(Self { segments })
    }

    pub fn push(&mut self, psi: &InvariantObservable, seg: Segment) -> Result<()> {
        if let Some(last) = self.segments.last() {
            let gap = last.end(psi)?.distance(&seg.start);
            if gap > PATH_GAP {
                return Err(Error::PathGap(gap));
            }
        }
        self.segments.push(seg);
        Ok(())
    }

    pub fn start(&self) -> Option<GroupElement> {
        self.segments.first().map(|s| s.start)
    }

    pub fn end(&self, psi: &InvariantObservable) -> Result<Option<GroupElement>> {
        self.segments.last().map(|s| s.end(psi)).transpose()
    }

    /// Checks endpoint matching and, for `closed`, the return to the start.
    pub fn validate(&self, psi: &InvariantObservable, closed: bool) -> Result<()> {
        for w in self.segments.windows(2) {
            let gap = w[0].end(psi)?.distance(&w[1].start);
            if gap > PATH_GAP {
                return Err(Error::PathGap(gap));
            }
        }
        if closed {
            if let (Some(a), Some(b)) = (self.start(), self.end(psi)?) {
                let gap = a.distance(&b);
                if gap > CLOSURE_GAP {
                    return Err(Error::PathGap(gap));
                }
            }
        }
        Ok(())
    }

    /// The boundary `Γ_δ` of a quadrilateral, starting with the flow side:
    /// `v → v4 → v3 → v2 → v1 → v`.
    pub fn quadrilateral(psi: &InvariantObservable, quad: &Quadrilateral) -> Result<Self> {
        let Quintuple { d1, d2, d3, d4, d5 } = quad.sides;
        Self::from_steps(
            psi,
            &quad.v,
            &[
                (SegmentKind::Flow, d5),
                (SegmentKind::Stable, -d4),
                (SegmentKind::Unstable, -d3),
                (SegmentKind::Stable, -d2),
                (SegmentKind::Unstable, -d1),
            ],
        )
    }

    /// A closed loop tangent to `span{X±, Z}`: out along the horocycle by
    /// `r`, along the flow for `t`, back along the horocycle by the contracted
    /// (or expanded) offset and back along the flow.
    pub fn flow_tangent_loop(psi: &InvariantObservable, v: &GroupElement, leaf: Leaf, r: f64, t: f64) -> Result<Self> {
        let (kind, back) = match leaf {
            Leaf::Stable => (SegmentKind::Stable, -r * (-t).exp()),
            Leaf::Unstable => (SegmentKind::Unstable, -r * t.exp()),
        };
        Self::from_steps(psi, v, &[(kind, r), (SegmentKind::Flow, t), (kind, back), (SegmentKind::Flow, -t)])
    }

    pub fn reversed(&self, psi: &InvariantObservable) -> Result<Self> {
        let mut segments = Vec::with_capacity(self.segments.len());
        for s in self.segments.iter().rev() {
            segments.push(Segment { kind: s.kind, start: s.end(psi)?, duration: -s.duration });
        }
        Ok(Self { segments })
    }
}

/// How line integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Closed-form orbit integrals for cocycle coefficients on their own
    /// horocycle and for `ψ` on flow segments; quadrature elsewhere.
    Cocycle,
    /// Gauss–Legendre quadrature of the coefficient along every segment.
    Quadrature,
}

/// Gauss–Legendre panels per unit length for segment quadrature.
const PANELS_PER_UNIT: f64 = 50.0;

fn segment_quadrature(
    psi: &InvariantObservable,
    coef: &Coefficient,
    start: &GroupElement,
    gen: Generator,
    len: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if coef.is_zero() || len == 0.0 {
        return Ok(0.0);
    }
    let (x, w) = gauss_legendre(8);
    let panels = ((len.abs() * PANELS_PER_UNIT).ceil() as usize).max(1);
    let mut err = None;
    let val = integrate_with(
        |s| match coef.value(psi, &flow_unchecked(start, gen, s), spec) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        0.0,
        len,
        panels,
        &x,
        &w,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(val),
    }
}

/// Integral of a coefficient along one frame-field segment of the given
/// generator.
fn coefficient_integral(
    psi: &InvariantObservable,
    coef: &Coefficient,
    start: &GroupElement,
    gen: Generator,
    len: f64,
    rule: Rule,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if rule == Rule::Quadrature {
        return segment_quadrature(psi, coef, start, gen, len, spec);
    }
    let mut rest = *coef;
    let mut out = 0.0;
    match gen {
        Generator::Unstable if coef.h_minus != 0.0 => {
            // ∫_0^ℓ h-(u e^{sX-}) ds = −∫_{-∞}^0 ψ(f^s w) − ψ(f^s u) ds.
            out -= coef.h_minus * unstable_pair(psi, start, len, spec)?;
            rest.h_minus = 0.0;
        }
        Generator::Stable if coef.h_plus != 0.0 => {
            // ∫_0^ℓ h+(u e^{sX+}) ds = ∫_0^∞ ψ(f^s w) − ψ(f^s u) ds.
            out += coef.h_plus * stable_pair(psi, start, len, spec)?;
            rest.h_plus = 0.0;
        }
        Generator::Geodesic if coef.psi != 0.0 => {
            out += coef.psi * orbit_integral(psi, start, len, spec)?;
            rest.psi = 0.0;
        }
        _ => {}
    }
    out += rest.constant * len;
    rest.constant = 0.0;
    Ok(out + segment_quadrature(psi, &rest, start, gen, len, spec)?)
}

/// `∫_path θ` under the given rule.
pub fn line_integral_with(
    psi: &InvariantObservable,
    form: &FrameOneForm,
    path: &SegmentPath,
    rule: Rule,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let mut total = 0.0;
    for seg in &path.segments {
        total += match seg.kind {
            SegmentKind::Unstable => coefficient_integral(psi, &form.minus, &seg.start, Generator::Unstable, seg.duration, rule, spec)?,
            SegmentKind::Stable => coefficient_integral(psi, &form.plus, &seg.start, Generator::Stable, seg.duration, rule, spec)?,
            SegmentKind::Flow => coefficient_integral(psi, &form.zero, &seg.start, Generator::Geodesic, seg.duration, rule, spec)?,
            SegmentKind::PsiFlow => {
                // θ(Z/ψ) dτ = θ(Z) dσ; the ψ part integrates to the duration.
                let sigma = reparam_time(psi, &seg.start, seg.duration)?;
                let smooth = form.zero.smooth_part();
                let rest = Coefficient { psi: 0.0, ..form.zero };
                let psi_part = match rule {
                    Rule::Cocycle => smooth.psi * seg.duration,
                    Rule::Quadrature => {
                        segment_quadrature(psi, &Coefficient::psi(smooth.psi), &seg.start, Generator::Geodesic, sigma, spec)?
                    }
                };
                psi_part + coefficient_integral(psi, &rest, &seg.start, Generator::Geodesic, sigma, rule, spec)?
            }
        };
    }
    Ok(total)
}

/// `∫_path θ` with closed-form cocycle rules.
pub fn line_integral(psi: &InvariantObservable, form: &FrameOneForm, path: &SegmentPath, spec: &QuadratureSpec) -> Result<f64> {
    path.validate(psi, false)?;
    line_integral_with(psi, form, path, Rule::Cocycle, spec)
}

/// `(a, b, c)` with `e^{-uX+} e^{δX-} e^{uX+} = e^{aX-} e^{bX+} e^{cZ}`.
fn horizontal_factors(u: f64, delta: f64) -> Result<(f64, f64, f64)> {
    // e^{-uX+} e^{δX-} e^{uX+} = [[1 − uδ, −u²δ], [δ, 1 + uδ]].
    let m11 = 1.0 - u * delta;
    let m12 = -u * u * delta;
    let m21 = delta;
    if m11 <= 0.0 {
        return Err(Error::Tiling("horizontal edge has no frame-tangent factorization"));
    }
    Ok((m21 / m11, m12 * m11, 2.0 * m11.ln()))
}

/// Circulations `(∮α_ψ, ∮α)` of one grid edge.
#[derive(Debug, Clone, Copy, Default)]
struct EdgeIntegral {
    psi_form: f64,
    alpha: f64,
}

/// Summary of a tiled Stokes computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesTiling {
    /// `Σ (∮α_ψ − ψ̄∮α)` over the tiles.
    pub residual: f64,
    /// `∮α_ψ` around the outer boundary.
    pub boundary_psi: f64,
    /// `∮α` around the outer boundary, the `dα`-area of the disk.
    pub area: f64,
    /// Sum of the tile circulations of `α_ψ`.
    pub tile_sum: f64,
    pub tiles: usize,
}

/// Tiles the disk `(s, u) ↦ v·e^{sX-}·e^{uX+}`, `0 ≤ s, u ≤ side`, by squares of
/// side `δ_tile`. Edges along `u` are stable segments; edges along `s` are the
/// frame-tangent paths `X-(a) X+(b) Z(c)` with the same endpoints. Each edge
/// is integrated once and used with opposite orientation by its two tiles.
pub fn stokes_tiling(
    psi: &InvariantObservable,
    v: &GroupElement,
    side: f64,
    delta_tile: f64,
    mean: f64,
    spec: &QuadratureSpec,
) -> Result<StokesTiling> {
    let n = (side / delta_tile).round();
    if n < 1.0 || (n * delta_tile - side).abs() > 1e-9 * side {
        return Err(Error::Tiling("tile size does not divide the side"));
    }
    let n = n as usize;
    let node = |i: usize, j: usize| {
        let a = flow_unchecked(v, Generator::Unstable, i as f64 * delta_tile);
        flow_unchecked(&a, Generator::Stable, j as f64 * delta_tile)
    };
    let alpha_psi = alpha_psi();
    let edge = |path: SegmentPath| -> Result<EdgeIntegral> {
        Ok(EdgeIntegral {
            psi_form: line_integral_with(psi, &alpha_psi, &path, Rule::Cocycle, spec)?,
            alpha: line_integral_with(psi, &FrameOneForm::ALPHA, &path, Rule::Cocycle, spec)?,
        })
    };
    // Horizontal edge (i, j): node(i, j) → node(i+1, j); vertical (i, j): node(i, j) → node(i, j+1).
    let horizontal = par::map_indexed(n * (n + 1), |k| {
        let (i, j) = (k % n, k / n);
        let (a, b, c) = horizontal_factors(j as f64 * delta_tile, delta_tile)?;
        let path =
            SegmentPath::from_steps(psi, &node(i, j), &[(SegmentKind::Unstable, a), (SegmentKind::Stable, b), (SegmentKind::Flow, c)])?;
        let gap = path.end(psi)?.map_or(0.0, |e| e.distance(&node(i + 1, j)));
        if gap > PATH_GAP {
            return Err(Error::PathGap(gap));
        }
        edge(path)
    });
    let vertical = par::map_indexed((n + 1) * n, |k| {
        let (i, j) = (k % (n + 1), k / (n + 1));
        edge(SegmentPath::from_steps(psi, &node(i, j), &[(SegmentKind::Stable, delta_tile)])?)
    });
    let horizontal: Vec<EdgeIntegral> = horizontal.into_iter().collect::<Result<_>>()?;
    let vertical: Vec<EdgeIntegral> = vertical.into_iter().collect::<Result<_>>()?;
    let h = |i: usize, j: usize| horizontal[j * n + i];
    let vt = |i: usize, j: usize| vertical[j * (n + 1) + i];

    let mut residual = 0.0;
    let mut tile_sum = 0.0;
    for j in 0..n {
        for i in 0..n {
            let circ = |f: fn(&EdgeIntegral) -> f64| f(&h(i, j)) + f(&vt(i + 1, j)) - f(&h(i, j + 1)) - f(&vt(i, j));
            let cp = circ(|e| e.psi_form);
            let ca = circ(|e| e.alpha);
            tile_sum += cp;
            residual += cp - mean * ca;
        }
    }
    let boundary = |f: fn(&EdgeIntegral) -> f64| {
        let mut s = 0.0;
        for i in 0..n {
            s += f(&h(i, 0)) - f(&h(i, n));
        }
        for j in 0..n {
            s += f(&vt(n, j)) - f(&vt(0, j));
        }
        s
    };
    Ok(StokesTiling {
        residual,
        boundary_psi: boundary(|e| e.psi_form),
        area: boundary(|e| e.alpha),
        tile_sum,
        tiles: n * n,
    })
}

/// Residual `Σ_tiles ∮α_ψ − ψ̄·∮α` of the tiled Stokes identity for the
/// square of side `side` at `v`.
pub fn stokes_residual(psi: &InvariantObservable, v: &GroupElement, side: f64, delta_tile: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(stokes_tiling(psi, v, side, delta_tile, psi.exact_mean(), spec)?.residual)
}

/// Largest `|∮α_ψ| / δ²` over the two flow-tangent loops of size `δ` at `v`.
pub fn reeb_defect(psi: &InvariantObservable, v: &GroupElement, delta: f64, spec: &QuadratureSpec) -> Result<f64> {
    let form = alpha_psi();
    let mut worst: f64 = 0.0;
    for leaf in [Leaf::Stable, Leaf::Unstable] {
        let path = SegmentPath::flow_tangent_loop(psi, v, leaf, delta, delta)?;
        path.validate(psi, true)?;
        worst = worst.max(line_integral_with(psi, &form, &path, Rule::Cocycle, spec)?.abs() / (delta * delta));
    }
    Ok(worst)
}
