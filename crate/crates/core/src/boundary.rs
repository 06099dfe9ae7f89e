//! Ideal boundary of the upper half-plane: Busemann functions, Gromov
//! products, cross ratios, axes and horocyclic leaf intersections.

use crate::error::{Error, Result};
use crate::lie::{flow_unchecked, Generator, GroupElement};

/// Above this modulus a finite boundary point is handled after conjugating by
/// `z -> -1/z`.
const FAR_POINT: f64 = 1e6;

/// Point of `R ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    pub fn is_finite_value(&self) -> bool {
        matches!(self, BoundaryPoint::Finite(x) if x.is_finite())
    }

    fn check(self) -> Result<Self> {
        match self {
            BoundaryPoint::Finite(x) if !x.is_finite() => Err(Error::Domain("boundary point")),
            p => Ok(p),
        }
    }

    /// Image under `z -> -1/z`.
    fn invert(self) -> Self {
        match self {
            BoundaryPoint::Infinity => BoundaryPoint::Finite(0.0),
            BoundaryPoint::Finite(x) if x == 0.0 => BoundaryPoint::Infinity,
            BoundaryPoint::Finite(x) => BoundaryPoint::Finite(-1.0 / x),
        }
    }

    /// Distance on the circle seen from `i` (chordal metric), used for
    /// convergence checks.
    pub fn chordal_distance(&self, other: &Self) -> f64 {
        let angle = |p: &Self| match p {
            BoundaryPoint::Infinity => std::f64::consts::PI,
            BoundaryPoint::Finite(x) => 2.0 * x.atan(),
        };
        let d = (angle(self) - angle(other)).abs();
        2.0 * (0.5 * d.min(2.0 * std::f64::consts::PI - d)).sin()
    }
}

/// Point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePoint {
    pub x: f64,
    pub y: f64,
}

impl BasePoint {
    pub const I: BasePoint = BasePoint { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) || y <= 0.0 {
            return Err(Error::Domain("base point"));
        }
        Ok(Self { x, y })
    }

    fn invert(self) -> Self {
        let r2 = self.x * self.x + self.y * self.y;
        BasePoint { x: -self.x / r2, y: self.y / r2 }
    }
}

pub fn hyperbolic_distance(p: BasePoint, q: BasePoint) -> f64 {
    let chord = ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt();
    2.0 * (chord / (2.0 * (p.y * q.y).sqrt())).asinh()
}

/// `b_p(q, ξ)`, the Busemann function at `ξ` normalized to vanish at `p`.
pub fn busemann(p: BasePoint, q: BasePoint, xi: BoundaryPoint) -> Result<f64> {
    match xi.check()? {
        BoundaryPoint::Infinity => Ok((p.y / q.y).ln()),
        BoundaryPoint::Finite(x) if x.abs() > FAR_POINT => {
            busemann(p.invert(), q.invert(), BoundaryPoint::Finite(x).invert())
        }
        BoundaryPoint::Finite(x) => {
            let dq = (q.x - x).powi(2) + q.y * q.y;
            let dp = (p.x - x).powi(2) + p.y * p.y;
            Ok((dq / q.y).ln() + (p.y / dp).ln())
        }
    }
}

/// A point on the geodesic joining `xi` and `eta`: the top of the semicircle,
/// or height one on a vertical line.
pub fn geodesic_apex(xi: BoundaryPoint, eta: BoundaryPoint) -> Result<BasePoint> {
    match (xi.check()?, eta.check()?) {
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => Err(Error::DegenerateGeodesic),
        (BoundaryPoint::Infinity, BoundaryPoint::Finite(x)) | (BoundaryPoint::Finite(x), BoundaryPoint::Infinity) => {
            Ok(BasePoint { x, y: 1.0 })
        }
        (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => {
            if a == b {
                return Err(Error::DegenerateGeodesic);
            }
            Ok(BasePoint { x: 0.5 * (a + b), y: 0.5 * (a - b).abs() })
        }
    }
}

/// Signed sum `b_p(q,ξ) + b_p(q,η)` at a point `q` of the geodesic; it is
/// never positive and does not depend on `q`.
pub fn gromov_raw(p: BasePoint, xi: BoundaryPoint, eta: BoundaryPoint) -> Result<f64> {
    gromov_raw_at(p, geodesic_apex(xi, eta)?, xi, eta)
}

/// Same sum evaluated at a caller-chosen point `q` of the geodesic.
pub fn gromov_raw_at(p: BasePoint, q: BasePoint, xi: BoundaryPoint, eta: BoundaryPoint) -> Result<f64> {
    Ok(busemann(p, q, xi)? + busemann(p, q, eta)?)
}

/// `β_p(ξ,η) = |b_p(q,ξ) + b_p(q,η)|`.
pub fn gromov_product(p: BasePoint, xi: BoundaryPoint, eta: BoundaryPoint) -> Result<f64> {
    Ok(gromov_raw(p, xi, eta)?.abs())
}

/// `[ξ,ξ',η,η'] = β(ξ,η') + β(ξ',η) − β(ξ,η) − β(ξ',η')`, with Gromov
/// products seen from `i`.
pub fn cross_ratio(xi: BoundaryPoint, xi2: BoundaryPoint, eta: BoundaryPoint, eta2: BoundaryPoint) -> Result<f64> {
    cross_ratio_at(BasePoint::I, xi, xi2, eta, eta2)
}

pub fn cross_ratio_at(
    p: BasePoint,
    xi: BoundaryPoint,
    xi2: BoundaryPoint,
    eta: BoundaryPoint,
    eta2: BoundaryPoint,
) -> Result<f64> {
    let b = |a, c| gromov_product(p, a, c);
    Ok((b(xi, eta2)? + b(xi2, eta)?) - (b(xi, eta)? + b(xi2, eta2)?))
}

/// Fixed points and translation length of a hyperbolic element.
pub fn axis(g: &GroupElement) -> Result<(BoundaryPoint, BoundaryPoint, f64)> {
    let [a, b, c, d] = g.entries();
    let tr = (a + d).abs();
    if tr <= 2.0 {
        return Err(Error::NotHyperbolic(tr));
    }
    let length = 2.0 * (0.5 * tr).acosh();
    // Attracting fixed point: |c x + d| > 1, i.e. derivative below one.
    if c == 0.0 {
        let x = BoundaryPoint::Finite(b / (d - a));
        return Ok(if a.abs() > d.abs() { (x, BoundaryPoint::Infinity, length) } else { (BoundaryPoint::Infinity, x, length) });
    }
    // c x² + (d − a) x − b = 0, written in the cancellation-free form.
    let disc = ((d - a).powi(2) + 4.0 * b * c).sqrt();
    let roots = [(a - d + disc) / (2.0 * c), (a - d - disc) / (2.0 * c)];
    let deriv = |x: f64| (c * x + d).abs();
    let (plus, minus) = if deriv(roots[0]) > deriv(roots[1]) { (roots[0], roots[1]) } else { (roots[1], roots[0]) };
    Ok((BoundaryPoint::Finite(minus), BoundaryPoint::Finite(plus), length))
}

/// Frame whose geodesic runs from `back` to `fwd`.
pub fn frame_on_geodesic(back: BoundaryPoint, fwd: BoundaryPoint) -> Result<GroupElement> {
    match (back.check()?, fwd.check()?) {
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => Err(Error::DegenerateGeodesic),
        (BoundaryPoint::Finite(b), BoundaryPoint::Infinity) => Ok(GroupElement::from_raw([1.0, b, 0.0, 1.0])),
        (BoundaryPoint::Infinity, BoundaryPoint::Finite(f)) => Ok(GroupElement::from_raw([f, -1.0, 1.0, 0.0])),
        (BoundaryPoint::Finite(b), BoundaryPoint::Finite(f)) => {
            if b == f {
                return Err(Error::DegenerateGeodesic);
            }
            let k = (f - b).abs().sqrt().recip();
            let m = if f > b { k } else { -k };
            Ok(GroupElement::from_raw([f * k, b * m, k, m]))
        }
    }
}

/// Frame based at `p` whose geodesic points toward `xi`.
pub fn frame_toward(p: BasePoint, xi: BoundaryPoint) -> Result<GroupElement> {
    let s = p.y.sqrt();
    let lift = GroupElement::from_raw([s, p.x / s, 0.0, 1.0 / s]);
    let alpha = match lift.inverse().act(xi.check()?) {
        BoundaryPoint::Infinity => 0.0,
        BoundaryPoint::Finite(z) => 1f64.atan2(-z),
    };
    let (sn, cs) = alpha.sin_cos();
    Ok(lift * GroupElement::from_raw([cs, sn, -sn, cs]))
}

/// Frame based at `p` whose geodesic comes from `xi`.
pub fn frame_away_from(p: BasePoint, xi: BoundaryPoint) -> Result<GroupElement> {
    Ok(frame_toward(p, xi)? * GroupElement::from_raw([0.0, 1.0, -1.0, 0.0]))
}

/// Horocyclic leaf kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leaf {
    Stable,
    Unstable,
}

/// Point where the stable (unstable) leaf of `v` meets the geodesic sharing
/// `v`'s forward (backward) endpoint and having `other_end` as its other end.
///
/// Stable case: `v·e^{rX+}` has backward endpoint `v·r`, so `r = v⁻¹·other_end`.
/// Unstable case: `v·e^{rX-}` has forward endpoint `v·(1/r)`.
pub fn leaf_intersection(v: &GroupElement, other_end: BoundaryPoint, leaf: Leaf) -> Result<GroupElement> {
    let z = v.inverse().act(other_end.check()?);
    match leaf {
        Leaf::Stable => match z {
            BoundaryPoint::Infinity => Err(Error::NoTransversal),
            BoundaryPoint::Finite(r) => Ok(flow_unchecked(v, Generator::Stable, r)),
        },
        Leaf::Unstable => match z {
            BoundaryPoint::Infinity => Ok(*v),
            BoundaryPoint::Finite(x) if x == 0.0 => Err(Error::NoTransversal),
            BoundaryPoint::Finite(x) => Ok(flow_unchecked(v, Generator::Unstable, 1.0 / x)),
        },
    }
}

/// Signed offset `r` with `leaf_intersection(v, other_end, leaf) = v·e^{rX±}`.
pub fn leaf_offset(v: &GroupElement, other_end: BoundaryPoint, leaf: Leaf) -> Result<f64> {
    let z = v.inverse().act(other_end.check()?);
    match (leaf, z) {
        (Leaf::Stable, BoundaryPoint::Infinity) => Err(Error::NoTransversal),
        (Leaf::Stable, BoundaryPoint::Finite(r)) => Ok(r),
        (Leaf::Unstable, BoundaryPoint::Infinity) => Ok(0.0),
        (Leaf::Unstable, BoundaryPoint::Finite(x)) if x == 0.0 => Err(Error::NoTransversal),
        (Leaf::Unstable, BoundaryPoint::Finite(x)) => Ok(1.0 / x),
    }
}

/// Geodesic time `t` with `w = f^t v` for two frames on the same oriented
/// geodesic, and the off-diagonal residual of `v⁻¹ w`.
pub fn time_along_orbit(v: &GroupElement, w: &GroupElement) -> (f64, f64) {
    let [a, b, c, d] = (v.inverse() * *w).entries();
    (2.0 * (a.abs() / d.abs()).sqrt().ln(), b.abs().max(c.abs()))
}

/// Result of running the stable/unstable circuit around four boundary points.
#[derive(Debug, Clone, Copy)]
pub struct Circuit {
    pub v1: GroupElement,
    pub corners: [GroupElement; 4],
    /// Geodesic time from `v1` to the last corner.
    pub time: f64,
    /// Off-diagonal size of `v1⁻¹ v5`; zero when the circuit closes onto the orbit.
    pub residual: f64,
}

/// Starts on the geodesic `ξ → η` at `start` (or at the default frame on it),
/// follows the stable leaf to `ξ' → η`, the unstable leaf to `ξ' → η'`, the
/// stable leaf to `ξ → η'` and the unstable leaf back to `ξ → η`.
pub fn holonomy_circuit(
    xi: BoundaryPoint,
    xi2: BoundaryPoint,
    eta: BoundaryPoint,
    eta2: BoundaryPoint,
    start: Option<GroupElement>,
) -> Result<Circuit> {
    let v1 = match start {
        Some(v) => v,
        None => frame_on_geodesic(xi, eta)?,
    };
    let v2 = leaf_intersection(&v1, xi2, Leaf::Stable)?;
    let v3 = leaf_intersection(&v2, eta2, Leaf::Unstable)?;
    let v4 = leaf_intersection(&v3, xi, Leaf::Stable)?;
    let v5 = leaf_intersection(&v4, eta, Leaf::Unstable)?;
    let (time, residual) = time_along_orbit(&v1, &v5);
    Ok(Circuit { v1, corners: [v2, v3, v4, v5], time, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        let two_i = BasePoint { x: 0.0, y: 2.0 };
        assert!((busemann(BasePoint::I, two_i, BoundaryPoint::Infinity).unwrap() + 2f64.ln()).abs() < 1e-15);
        let g = gromov_product(BasePoint::I, BoundaryPoint::Infinity, BoundaryPoint::Finite(1.0)).unwrap();
        assert!((g - 2f64.ln()).abs() < 1e-15);
        let e = std::f64::consts::E;
        let cr = cross_ratio(
            BoundaryPoint::Finite(0.0),
            BoundaryPoint::Infinity,
            BoundaryPoint::Finite(e),
            BoundaryPoint::Finite(1.0),
        )
        .unwrap();
        assert!((cr - 2.0).abs() < 1e-14, "{cr}");
    }

    #[test]
    fn frames_point_where_asked() {
        let p = BasePoint { x: 0.3, y: 0.7 };
        for xi in [BoundaryPoint::Finite(-2.0), BoundaryPoint::Finite(5.0), BoundaryPoint::Infinity] {
            let v = frame_toward(p, xi).unwrap();
            let b = v.base_point();
            assert!((b.x - p.x).abs() < 1e-14 && (b.y - p.y).abs() < 1e-14);
            assert!(v.endpoints().1.chordal_distance(&xi) < 1e-14);
            let u = frame_away_from(p, xi).unwrap();
            assert!(u.endpoints().0.chordal_distance(&xi) < 1e-14);
        }
    }

    #[test]
    fn far_points_use_inversion() {
        let p = BasePoint { x: 0.1, y: 1.3 };
        let q = BasePoint { x: -0.4, y: 0.6 };
        let near = busemann(p, q, BoundaryPoint::Finite(9.0e5)).unwrap();
        let far = busemann(p, q, BoundaryPoint::Finite(1.1e6)).unwrap();
        let inf = busemann(p, q, BoundaryPoint::Infinity).unwrap();
        assert!((near - inf).abs() < 1e-5 && (far - inf).abs() < 1e-5);
    }
}
