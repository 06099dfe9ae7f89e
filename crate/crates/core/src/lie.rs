//! PSL(2,R) arithmetic: frames, one-parameter subgroups and the closing
//! quadrilateral.
//!
//! A frame `g` is a unit tangent vector of the hyperbolic plane: its base point
//! is `g·i` and the geodesic through it runs from `g·0` to `g·∞`. All flows act
//! by right multiplication.

use std::fmt;
use std::ops::Mul;

use crate::boundary::{BasePoint, BoundaryPoint};
use crate::error::{Error, Result};

/// Drift of the determinant above which a product is rescaled.
const RENORM_THRESHOLD: f64 = 1e-13;

/// Unit-determinant 2×2 matrix modulo ±I, stored row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct GroupElement {
    m: [f64; 4],
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.m;
        write!(f, "[[{a:.6e}, {b:.6e}], [{c:.6e}, {d:.6e}]]")
    }
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { m: [1.0, 0.0, 0.0, 1.0] };

    /// Builds a frame from matrix entries. The determinant must be within
    /// 1e-9 of one; the result is rescaled to determinant one and sign-normalized.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite()) {
            return Err(Error::Domain("matrix entry"));
        }
        let det = a * d - b * c;
        if (det - 1.0).abs() > 1e-9 {
            return Err(Error::Determinant(det));
        }
        Ok(Self::from_raw([a, b, c, d]))
    }

    /// Rescales by sqrt(det) when needed and fixes the sign representative.
    /// Callers guarantee a positive determinant.
    pub(crate) fn from_raw(mut m: [f64; 4]) -> Self {
        let det = m[0] * m[3] - m[1] * m[2];
        if (det - 1.0).abs() > RENORM_THRESHOLD {
            let s = det.sqrt().recip();
            for x in &mut m {
                *x *= s;
            }
        }
        let mut k = 0;
        for i in 1..4 {
            if m[i].abs() > m[k].abs() {
                k = i;
            }
        }
        if m[k] < 0.0 {
            for x in &mut m {
                *x = -*x;
            }
        }
        GroupElement { m }
    }

    pub fn entries(&self) -> [f64; 4] {
        self.m
    }

    pub fn det(&self) -> f64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn trace(&self) -> f64 {
        self.m[0] + self.m[3]
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.m;
        Self::from_raw([d, -b, -c, a])
    }

    /// Frobenius distance between the matrices, minimized over the sign.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut plus = 0.0;
        let mut minus = 0.0;
        for i in 0..4 {
            plus += (self.m[i] - other.m[i]).powi(2);
            minus += (self.m[i] + other.m[i]).powi(2);
        }
        plus.min(minus).sqrt()
    }

    /// Squared Frobenius norm; equals 2·cosh d(i, g·i).
    pub fn norm_sq(&self) -> f64 {
        self.m.iter().map(|x| x * x).sum()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// Möbius action on the boundary circle.
    pub fn act(&self, xi: BoundaryPoint) -> BoundaryPoint {
        let [a, b, c, d] = self.m;
        match xi {
            BoundaryPoint::Infinity => {
                if c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(a / c)
                }
            }
            BoundaryPoint::Finite(x) => {
                let den = c * x + d;
                if den == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((a * x + b) / den)
                }
            }
        }
    }

    /// Möbius action on the upper half-plane.
    pub fn act_point(&self, p: BasePoint) -> BasePoint {
        let [a, b, c, d] = self.m;
        // (a z + b)/(c z + d) with z = x + iy
        let (x, y) = (p.x, p.y);
        let den = (c * x + d).powi(2) + (c * y).powi(2);
        let re = ((a * x + b) * (c * x + d) + a * c * y * y) / den;
        let im = y / den;
        BasePoint { x: re, y: im }
    }

    /// Base point `g·i` of the frame.
    pub fn base_point(&self) -> BasePoint {
        self.act_point(BasePoint::I)
    }

    /// Backward and forward endpoints `(g·0, g·∞)`.
    pub fn endpoints(&self) -> (BoundaryPoint, BoundaryPoint) {
        (self.act(BoundaryPoint::Finite(0.0)), self.act(BoundaryPoint::Infinity))
    }

    pub fn to_matrix(&self) -> [[f64; 2]; 2] {
        [[self.m[0], self.m[1]], [self.m[2], self.m[3]]]
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, o: GroupElement) -> GroupElement {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = o.m;
        GroupElement::from_raw([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }
}

impl Mul<&GroupElement> for &GroupElement {
    type Output = GroupElement;
    fn mul(self, o: &GroupElement) -> GroupElement {
        *self * *o
    }
}

/// One-parameter subgroups used as flows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    /// Geodesic flow, generated by `Z/2 = diag(1/2, -1/2)`.
    Geodesic,
    /// Stable horocycle flow `[[1, r], [0, 1]]`.
    Stable,
    /// Unstable horocycle flow `[[1, 0], [r, 1]]`.
    Unstable,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::Geodesic => "geodesic",
            Generator::Stable => "stable",
            Generator::Unstable => "unstable",
        }
    }

    /// The generator as an algebra vector in the `(X-, Z, X+)` basis.
    pub fn algebra(self) -> AlgebraVector {
        match self {
            Generator::Geodesic => FlowConvention::STANDARD.geodesic,
            Generator::Stable => FlowConvention::STANDARD.stable,
            Generator::Unstable => FlowConvention::STANDARD.unstable,
        }
    }
}

/// Closed-form exponential of `r` times the generator.
pub fn exp_generator(kind: Generator, r: f64) -> Result<GroupElement> {
    if !r.is_finite() {
        return Err(Error::Domain("flow parameter"));
    }
    Ok(exp_unchecked(kind, r))
}

pub(crate) fn exp_unchecked(kind: Generator, r: f64) -> GroupElement {
    match kind {
        Generator::Geodesic => {
            let e = (0.5 * r).exp();
            GroupElement::from_raw([e, 0.0, 0.0, e.recip()])
        }
        Generator::Stable => GroupElement::from_raw([1.0, r, 0.0, 1.0]),
        Generator::Unstable => GroupElement::from_raw([1.0, 0.0, r, 1.0]),
    }
}

/// `v · exp(t · kind)`.
pub fn flow(v: &GroupElement, kind: Generator, t: f64) -> Result<GroupElement> {
    Ok(*v * exp_generator(kind, t)?)
}

pub(crate) fn flow_unchecked(v: &GroupElement, kind: Generator, t: f64) -> GroupElement {
    *v * exp_unchecked(kind, t)
}

/// Element of sl(2,R) in the basis `X- = [[0,0],[1,0]]`, `Z = diag(1,-1)`,
/// `X+ = [[0,1],[0,0]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlgebraVector {
    pub c_minus: f64,
    pub c_z: f64,
    pub c_plus: f64,
}

impl AlgebraVector {
    pub const X_MINUS: AlgebraVector = AlgebraVector { c_minus: 1.0, c_z: 0.0, c_plus: 0.0 };
    pub const Z: AlgebraVector = AlgebraVector { c_minus: 0.0, c_z: 1.0, c_plus: 0.0 };
    pub const X_PLUS: AlgebraVector = AlgebraVector { c_minus: 0.0, c_z: 0.0, c_plus: 1.0 };

    pub fn new(c_minus: f64, c_z: f64, c_plus: f64) -> Self {
        Self { c_minus, c_z, c_plus }
    }

    pub fn to_matrix(&self) -> [[f64; 2]; 2] {
        [[self.c_z, self.c_plus], [self.c_minus, -self.c_z]]
    }

    /// Reads a traceless matrix; the trace part is discarded.
    pub fn from_matrix(m: [[f64; 2]; 2]) -> Self {
        Self { c_minus: m[1][0], c_z: 0.5 * (m[0][0] - m[1][1]), c_plus: m[0][1] }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { c_minus: s * self.c_minus, c_z: s * self.c_z, c_plus: s * self.c_plus }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { c_minus: self.c_minus + o.c_minus, c_z: self.c_z + o.c_z, c_plus: self.c_plus + o.c_plus }
    }

    /// Lie bracket from the structure constants
    /// `[Z,X+] = 2X+`, `[Z,X-] = -2X-`, `[X+,X-] = Z`.
    pub fn bracket(&self, o: &Self) -> Self {
        let (m1, z1, p1) = (self.c_minus, self.c_z, self.c_plus);
        let (m2, z2, p2) = (o.c_minus, o.c_z, o.c_plus);
        Self {
            c_minus: -2.0 * (z1 * m2 - m1 * z2),
            c_z: p1 * m2 - m1 * p2,
            c_plus: 2.0 * (z1 * p2 - p1 * z2),
        }
    }

    pub fn norm(&self) -> f64 {
        (self.c_minus.powi(2) + self.c_z.powi(2) + self.c_plus.powi(2)).sqrt()
    }
}

/// Matrix commutator `XY - YX`, kept separate from [`AlgebraVector::bracket`]
/// so the structure constants can be checked against it.
pub fn matrix_commutator(x: &AlgebraVector, y: &AlgebraVector) -> AlgebraVector {
    let a = x.to_matrix();
    let b = y.to_matrix();
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                c[i][j] += a[i][k] * b[k][j] - b[i][k] * a[k][j];
            }
        }
    }
    AlgebraVector::from_matrix(c)
}

/// `Ad(g) X = g X g⁻¹`.
pub fn adjoint(g: &GroupElement, x: &AlgebraVector) -> AlgebraVector {
    let [a, b, c, d] = g.entries();
    let m = x.to_matrix();
    let gm = [
        [a * m[0][0] + b * m[1][0], a * m[0][1] + b * m[1][1]],
        [c * m[0][0] + d * m[1][0], c * m[0][1] + d * m[1][1]],
    ];
    // multiply by g^{-1} = [[d,-b],[-c,a]]
    let r = [
        [gm[0][0] * d - gm[0][1] * c, -gm[0][0] * b + gm[0][1] * a],
        [gm[1][0] * d - gm[1][1] * c, -gm[1][0] * b + gm[1][1] * a],
    ];
    AlgebraVector::from_matrix(r)
}

/// The tangent vector `X` at `v`, pushed forward by the time-`t` geodesic flow
/// and expressed in the frame at the image point.
pub fn pushforward(t: f64, x: &AlgebraVector) -> AlgebraVector {
    adjoint(&exp_unchecked(Generator::Geodesic, -t), x)
}

/// Generators of the three flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConvention {
    pub geodesic: AlgebraVector,
    pub stable: AlgebraVector,
    pub unstable: AlgebraVector,
}

impl FlowConvention {
    /// Geodesic generator `Z/2`: contraction and expansion rates are exactly one.
    pub const STANDARD: FlowConvention = FlowConvention {
        geodesic: AlgebraVector { c_minus: 0.0, c_z: 0.5, c_plus: 0.0 },
        stable: AlgebraVector::X_PLUS,
        unstable: AlgebraVector::X_MINUS,
    };
}

/// Side lengths of a closing quadrilateral: `v·e^{d1 X-}·e^{d2 X+}·e^{d3 X-}·e^{d4 X+} = f^{d5} v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quintuple {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub d5: f64,
}

/// Solves for the last three sides given the first two.
///
/// With `P = e^{d1 X-} e^{d2 X+} = [[1, d2], [d1, 1 + d1 d2]]`, killing the
/// lower-left entry gives `d3 = -d1/(1+d1 d2)`, after which the upper-left entry
/// is `1/(1+d1 d2)`; killing the upper-right entry gives `d4 = -d2 (1+d1 d2)`.
/// The remaining diagonal matrix is the geodesic flow for `d5 = -2 log(1+d1 d2)`.
pub fn quadrilateral_close(d1: f64, d2: f64) -> Result<Quintuple> {
    if !(d1.is_finite() && d2.is_finite()) {
        return Err(Error::Domain("quadrilateral side"));
    }
    let s = 1.0 + d1 * d2;
    if s <= 0.0 {
        return Err(Error::DegenerateQuadrilateral(s));
    }
    Ok(Quintuple { d1, d2, d3: -d1 / s, d4: -d2 * s, d5: -2.0 * (d1 * d2).ln_1p() })
}

/// Third-order approximation of the closing quintuple for `d1 = d2 = δ`:
/// `(δ, δ, -δ + δ³/(1+δ²), -(δ + δ³/2), log(1+δ²))`, with the last entry
/// converted to the rate-one, right-action time of [`FlowConvention::STANDARD`]
/// (factor `-2`).
pub fn approximate_quintuple(delta: f64) -> Quintuple {
    let d2 = delta * delta;
    Quintuple {
        d1: delta,
        d2: delta,
        d3: -delta + d2 * delta / (1.0 + d2),
        d4: -(delta + 0.5 * d2 * delta),
        d5: -2.0 * d2.ln_1p(),
    }
}

/// The four corners `v1..v4` of the quadrilateral based at `w`.
pub fn quadrilateral_corners(w: &GroupElement, q: &Quintuple) -> [GroupElement; 4] {
    let v1 = flow_unchecked(w, Generator::Unstable, q.d1);
    let v2 = flow_unchecked(&v1, Generator::Stable, q.d2);
    let v3 = flow_unchecked(&v2, Generator::Unstable, q.d3);
    let v4 = flow_unchecked(&v3, Generator::Stable, q.d4);
    [v1, v2, v3, v4]
}

/// Frobenius gap between the end of the horocycle path and `f^{d5} w`.
pub fn holonomy_closure_check(w: &GroupElement, q: &Quintuple) -> f64 {
    let [_, _, _, v4] = quadrilateral_corners(w, q);
    v4.distance(&flow_unchecked(w, Generator::Geodesic, q.d5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_representative_is_canonical() {
        let g = GroupElement::new(-2.0, 0.0, 0.0, -0.5).unwrap();
        assert_eq!(g.entries(), [2.0, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn exp_examples() {
        let g = exp_generator(Generator::Geodesic, 2.0 * 2f64.ln()).unwrap();
        assert!(g.approx_eq(&GroupElement::new(2.0, 0.0, 0.0, 0.5).unwrap(), 1e-15));
        assert_eq!(exp_generator(Generator::Stable, 0.0).unwrap(), GroupElement::IDENTITY);
        assert!(exp_generator(Generator::Unstable, f64::NAN).is_err());
    }

    #[test]
    fn bracket_matches_matrix_commutator() {
        let basis = [AlgebraVector::X_MINUS, AlgebraVector::Z, AlgebraVector::X_PLUS];
        for x in &basis {
            for y in &basis {
                let a = x.bracket(y);
                let b = matrix_commutator(x, y);
                assert!(a.add(&b.scale(-1.0)).norm() == 0.0, "{x:?} {y:?}");
            }
        }
        assert_eq!(AlgebraVector::Z.bracket(&AlgebraVector::X_PLUS), AlgebraVector::X_PLUS.scale(2.0));
        assert_eq!(AlgebraVector::Z.bracket(&AlgebraVector::X_MINUS), AlgebraVector::X_MINUS.scale(-2.0));
        assert_eq!(AlgebraVector::X_PLUS.bracket(&AlgebraVector::X_MINUS), AlgebraVector::Z);
    }

    #[test]
    fn closed_form_quadrilateral() {
        let q = quadrilateral_close(0.1, 0.1).unwrap();
        assert!((q.d3 + 0.1 / 1.01).abs() < 1e-16);
        assert!((q.d4 + 0.101).abs() < 1e-16);
        assert!(quadrilateral_close(1.0, -1.0).is_err());
        let zero = quadrilateral_close(0.0, 0.0).unwrap();
        assert_eq!((zero.d3, zero.d4, zero.d5), (0.0, 0.0, 0.0));
    }
}
