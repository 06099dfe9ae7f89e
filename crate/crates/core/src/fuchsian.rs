//! The genus-2 octagon group, reduction to its Dirichlet domain, exactly
//! invariant bump observables and Haar sampling of the quotient.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lie::GroupElement;
use crate::par;

/// Reduction gives up after this many wall crossings.
const MAX_REDUCTION_STEPS: usize = 10_000;
/// Relative slack when comparing `cosh d(i, ·)`; keeps reduction from
/// oscillating across a wall.
const WALL_SLACK: f64 = 1e-12;
/// Frames whose base point lies within this distance of the domain can be
/// evaluated without reduction.
pub const EVAL_MARGIN: f64 = 0.75;
/// Largest jump allowed by [`InvariantObservable::clearance_time`].
pub const CLEARANCE_HORIZON: f64 = 2.5;
/// Samples per random stream; sample `k` always comes from stream `k / SHARD`.
pub const SHARD: usize = 4096;

/// Rotation by angle `phi` about `i`.
pub fn rotation(phi: f64) -> GroupElement {
    let (s, c) = (0.5 * phi).sin_cos();
    GroupElement::from_raw([c, s, -s, c])
}

/// Translation by `len` along the imaginary axis.
pub fn translation(len: f64) -> GroupElement {
    let e = (0.5 * len).exp();
    GroupElement::from_raw([e, 0.0, 0.0, 1.0 / e])
}

/// Frame at `x + iy` rotated by `theta` from the upward direction.
pub fn frame_at(x: f64, y: f64, theta: f64) -> GroupElement {
    let s = y.sqrt();
    GroupElement::from_raw([s, x / s, 0.0, 1.0 / s]) * rotation(theta)
}

/// Cocompact Fuchsian group of the regular octagon with angles π/4.
#[derive(Debug, Clone)]
pub struct FuchsianGroup {
    /// Side pairings `g0..g3` followed by their inverses.
    pub generators: Vec<GroupElement>,
    /// Word in generator indices (`k` for `g_k`, `k + 4` for its inverse)
    /// that evaluates to the identity.
    pub relation: Vec<usize>,
    /// Length of the shortest closed geodesic.
    pub systole: f64,
    /// Distance from `i` to the octagon's vertices.
    pub circumradius: f64,
    /// Distance from `i` to the octagon's sides.
    pub inradius: f64,
}

impl FuchsianGroup {
    pub fn octagon() -> Result<Self> {
        let inradius = (1.0 + SQRT_2).acosh();
        let circumradius = ((1.0 + SQRT_2) * (1.0 + SQRT_2)).acosh();
        let mut generators: Vec<GroupElement> = (0..4)
            .map(|k| {
                let phi = k as f64 * FRAC_PI_4;
                rotation(phi) * translation(2.0 * inradius) * rotation(-phi)
            })
            .collect();
        let inverses: Vec<GroupElement> = generators.iter().map(|g| g.inverse()).collect();
        generators.extend(inverses);
        let group = Self {
            generators,
            relation: vec![0, 5, 2, 7, 4, 1, 6, 3],
            systole: 2.0 * inradius,
            circumradius,
            inradius,
        };
        let residual = group.relation_residual();
        if residual > 1e-9 {
            return Err(Error::Relation(residual));
        }
        Ok(group)
    }

    /// Distance of the relation word from the identity.
    pub fn relation_residual(&self) -> f64 {
        let prod = self.relation.iter().fold(GroupElement::IDENTITY, |acc, &k| acc * self.generators[k]);
        prod.distance(&GroupElement::IDENTITY)
    }

    /// All products of at most `len` generators, without immediate
    /// cancellations, paired with their words.
    pub fn word_ball(&self, len: usize) -> Vec<(Vec<usize>, GroupElement)> {
        let mut out = vec![(Vec::new(), GroupElement::IDENTITY)];
        let mut frontier = out.clone();
        for _ in 0..len {
            let mut next = Vec::new();
            for (word, g) in &frontier {
                for k in 0..8 {
                    if let Some(&last) = word.last() {
                        if (last + 4) % 8 == k {
                            continue;
                        }
                    }
                    let mut w = word.clone();
                    w.push(k);
                    next.push((w, *g * self.generators[k]));
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

/// Dirichlet domain centered at `i`; its walls are the side pairings.
#[derive(Debug, Clone)]
pub struct DirichletDomain {
    pub walls: Vec<GroupElement>,
}

impl DirichletDomain {
    pub fn new(group: &FuchsianGroup) -> Self {
        Self { walls: group.generators.clone() }
    }

    /// Writes `g = γ·g0` with the base point of `g0` in the domain.
    pub fn reduce(&self, g: &GroupElement) -> Result<(GroupElement, GroupElement)> {
        let mut gamma = GroupElement::IDENTITY;
        let mut g0 = *g;
        for _ in 0..MAX_REDUCTION_STEPS {
            match self.best_wall(&g0) {
                None => return Ok((gamma, g0)),
                Some(k) => {
                    g0 = self.walls[k] * g0;
                    gamma = gamma * self.walls[k].inverse();
                }
            }
        }
        Err(Error::ReductionStuck(MAX_REDUCTION_STEPS))
    }

    /// Reduced representative only.
    pub fn reduce_frame(&self, g: &GroupElement) -> Result<GroupElement> {
        let mut g0 = *g;
        for _ in 0..MAX_REDUCTION_STEPS {
            match self.best_wall(&g0) {
                None => return Ok(g0),
                Some(k) => g0 = self.walls[k] * g0,
            }
        }
        Err(Error::ReductionStuck(MAX_REDUCTION_STEPS))
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.best_wall(g).is_none()
    }

    /// Wall whose crossing brings the base point closest to `i`, if any
    /// crossing brings it closer.
    fn best_wall(&self, g: &GroupElement) -> Option<usize> {
        let current = g.norm_sq();
        let [a, b, c, d] = g.entries();
        let mut best = None;
        let mut best_val = current * (1.0 - WALL_SLACK);
        for (k, w) in self.walls.iter().enumerate() {
            let [p, q, r, s] = w.entries();
            let n = (p * a + q * c).powi(2) + (p * b + q * d).powi(2) + (r * a + s * c).powi(2) + (r * b + s * d).powi(2);
            if n < best_val {
                best_val = n;
                best = Some(k);
            }
        }
        best
    }
}

/// The surface: group, domain and the constants derived from them.
#[derive(Debug, Clone)]
pub struct Surface {
    pub group: FuchsianGroup,
    pub domain: DirichletDomain,
}

impl Surface {
    pub fn octagon() -> Result<Arc<Self>> {
        let group = FuchsianGroup::octagon()?;
        let domain = DirichletDomain::new(&group);
        Ok(Arc::new(Self { group, domain }))
    }

    /// Liouville volume of the unit tangent bundle in the normalization used
    /// by [`liouville_sample`]: area `4π` times fiber length `2π`.
    pub fn volume(&self) -> f64 {
        8.0 * PI * PI
    }
}

/// Frame-field directions used for derivatives: `X-`, the geodesic generator
/// `Z/2`, and `X+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    XMinus,
    Z,
    XPlus,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::XMinus, Direction::Z, Direction::XPlus];

    fn matrix(self) -> [f64; 4] {
        match self {
            Direction::XMinus => [0.0, 0.0, 1.0, 0.0],
            Direction::Z => [0.5, 0.0, 0.0, -0.5],
            Direction::XPlus => [0.0, 1.0, 0.0, 0.0],
        }
    }
}

/// Which derivative of an observable to evaluate. `Second(x, y)` is
/// `x(yψ)`: the derivative along `x` of the function `yψ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivative {
    Value,
    First(Direction),
    Second(Direction, Direction),
}

/// Smooth bump on PSL(2,R) around `center`: `amplitude · exp(1 − 1/(1 − q/ρ²))`
/// with `q = |center⁻¹ g − I|²` (Frobenius), zero for `q ≥ ρ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: GroupElement,
    pub amplitude: f64,
    pub radius: f64,
}

impl Bump {
    /// Largest distance between the base points of `center` and of a frame in
    /// the support: `|g| ≤ √2 + ρ` bounds `2 cosh d = |g|²`.
    pub fn base_radius(&self) -> f64 {
        support_base_radius(self.radius)
    }
}

pub fn support_base_radius(rho: f64) -> f64 {
    (0.5 * (SQRT_2 + rho).powi(2)).acosh()
}

/// Profile `e(u) = exp(1 − 1/(1 − u))` and its first two derivatives.
fn profile(u: f64) -> (f64, f64, f64) {
    if u >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let w = 1.0 / (1.0 - u);
    let e = (1.0 - w).exp();
    (e, -e * w * w, e * (w.powi(4) - 2.0 * w.powi(3)))
}

fn mat_mul(x: &[f64; 4], y: &[f64; 4]) -> [f64; 4] {
    [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
}

fn dot(x: &[f64; 4], y: &[f64; 4]) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3]
}

/// Value or derivative of one bump term at `h = center⁻¹ g`.
fn bump_term(h: &[f64; 4], amplitude: f64, rho2: f64, der: Derivative) -> f64 {
    let dm = [h[0] - 1.0, h[1], h[2], h[3] - 1.0];
    let dp = [h[0] + 1.0, h[1], h[2], h[3] + 1.0];
    let (qm, qp) = (dot(&dm, &dm), dot(&dp, &dp));
    let (q, diff) = if qm <= qp { (qm, dm) } else { (qp, dp) };
    if q >= rho2 {
        return 0.0;
    }
    let (e0, e1, e2) = profile(q / rho2);
    match der {
        Derivative::Value => amplitude * e0,
        Derivative::First(x) => {
            let hx = mat_mul(h, &x.matrix());
            amplitude * e1 * 2.0 * dot(&diff, &hx) / rho2
        }
        Derivative::Second(x, y) => {
            let hx = mat_mul(h, &x.matrix());
            let hy = mat_mul(h, &y.matrix());
            let hxy = mat_mul(&hx, &y.matrix());
            let qx = 2.0 * dot(&diff, &hx);
            let qy = 2.0 * dot(&diff, &hy);
            let qxy = 2.0 * dot(&hx, &hy) + 2.0 * dot(&diff, &hxy);
            amplitude * (e2 * qx * qy / (rho2 * rho2) + e1 * qxy / rho2)
        }
    }
}

/// `ψ = base + Σ bumps`, summed over the Γ-orbit of every bump center, so
/// that `ψ(γg) = ψ(g)` holds exactly.
#[derive(Debug, Clone)]
pub struct InvariantObservable {
    pub base: f64,
    pub bumps: Vec<Bump>,
    surface: Arc<Surface>,
    /// For each bump, the translated centers that can reach a frame based
    /// near the domain.
    translates: Vec<Vec<Translate>>,
    /// Translated centers within [`CLEARANCE_HORIZON`] of the domain.
    far_translates: Vec<Vec<Translate>>,
    norms: [f64; 3],
    cosh_near: f64,
}

impl InvariantObservable {
    /// A positive observable: requires `base − Σ|amplitude| > 0` and each
    /// bump's support to be smaller than half the systole.
    pub fn new(surface: Arc<Surface>, base: f64, bumps: Vec<Bump>) -> Result<Self> {
        let budget = base - bumps.iter().map(|b| b.amplitude.abs()).sum::<f64>();
        if !(budget > 0.0) {
            return Err(Error::Domain("observable is not bounded below by a positive constant"));
        }
        Self::test_function(surface, base, bumps)
    }

    /// Same construction without the positivity requirement; used for
    /// correlation test functions.
    pub fn test_function(surface: Arc<Surface>, base: f64, bumps: Vec<Bump>) -> Result<Self> {
        if !base.is_finite() {
            return Err(Error::Domain("observable base value"));
        }
        let mut translates = Vec::with_capacity(bumps.len());
        let mut far_translates = Vec::with_capacity(bumps.len());
        for b in &bumps {
            if !(b.radius > 0.0 && b.amplitude.is_finite()) || 2.0 * b.base_radius() >= surface.group.systole {
                return Err(Error::Domain("bump radius"));
            }
            translates.push(orbit_translates(&surface, &b.center, b.base_radius(), EVAL_MARGIN)?);
            far_translates.push(orbit_translates(&surface, &b.center, b.base_radius(), CLEARANCE_HORIZON)?);
        }
        let norms = derivative_sups(&bumps);
        let cosh_near = (surface.group.circumradius + EVAL_MARGIN).cosh();
        Ok(Self { base, bumps, surface, translates, far_translates, norms, cosh_near })
    }

    pub fn constant(surface: Arc<Surface>, c: f64) -> Result<Self> {
        Self::new(surface, c, Vec::new())
    }

    pub fn surface(&self) -> &Arc<Surface> {
        &self.surface
    }

    pub fn is_constant(&self) -> bool {
        self.bumps.iter().all(|b| b.amplitude == 0.0)
    }

    /// `ψ` or one of its frame derivatives at `v`.
    pub fn evaluate(&self, v: &GroupElement, der: Derivative) -> Result<f64> {
        let g0 = self.surface.domain.reduce_frame(v)?;
        Ok(self.evaluate_reduced(&g0, der))
    }

    /// Evaluation for a frame based in the domain or within
    /// [`EVAL_MARGIN`] of it.
    pub fn evaluate_reduced(&self, g0: &GroupElement, der: Derivative) -> f64 {
        let mut total = if der == Derivative::Value { self.base } else { 0.0 };
        let g = g0.entries();
        let p = hyperboloid(&g);
        for (bump, list) in self.bumps.iter().zip(&self.translates) {
            let rho2 = bump.radius * bump.radius;
            for t in list {
                if minkowski(&p, &t.center) > t.cosh_reach {
                    continue;
                }
                let h = mat_mul(&t.inverse, &g);
                total += bump_term(&h, bump.amplitude, rho2, der);
            }
        }
        total
    }

    /// Geodesic time `s ≥ 0` such that `ψ` equals `base` (with vanishing
    /// derivatives) at `f^σ(g0)·e^{ρX}` for all `0 ≤ σ < s` and all horocycle
    /// offsets `|ρ| ≤ offset < 1`, where `g0` is based in the domain.
    ///
    /// With `h = t⁻¹ g` and `x = |h ∓ I|`, flowing changes `x` at rate at most
    /// `|h Z/2| ≤ (√2 + x)/2`, so `√2 + x` decays no faster than `e^{-σ/2}`; an
    /// offset multiplies it by at least `1 − |ρ|`. Centers outside the
    /// clearance list are at least [`CLEARANCE_HORIZON`] away in base distance.
    pub fn clearance_time(&self, g0: &GroupElement, offset: f64) -> f64 {
        if offset >= 1.0 {
            return 0.0;
        }
        let g = g0.entries();
        let mut best = CLEARANCE_HORIZON - offset;
        let shrink = (1.0 - offset).ln();
        for (bump, list) in self.bumps.iter().zip(&self.far_translates) {
            if bump.amplitude == 0.0 {
                continue;
            }
            let limit = (SQRT_2 + bump.radius).ln();
            for t in list {
                let h = mat_mul(&t.inverse, &g);
                let qm = (h[0] - 1.0).powi(2) + h[1] * h[1] + h[2] * h[2] + (h[3] - 1.0).powi(2);
                let qp = (h[0] + 1.0).powi(2) + h[1] * h[1] + h[2] * h[2] + (h[3] + 1.0).powi(2);
                let x = qm.min(qp).sqrt();
                best = best.min(2.0 * ((SQRT_2 + x).ln() + shrink - limit));
            }
        }
        best.max(0.0)
    }

    /// Evaluation that reduces only when the base point is too far from `i`
    /// for [`InvariantObservable::evaluate_reduced`].
    pub fn evaluate_near(&self, g: &GroupElement, der: Derivative) -> f64 {
        if 0.5 * g.norm_sq() <= self.cosh_near {
            self.evaluate_reduced(g, der)
        } else {
            let g0 = self.surface.domain.reduce_frame(g).expect("reduction of a finite frame terminates");
            self.evaluate_reduced(&g0, der)
        }
    }

    pub fn value(&self, v: &GroupElement) -> Result<f64> {
        self.evaluate(v, Derivative::Value)
    }

    /// `base − Σ|amplitude|`.
    pub fn lower_bound(&self) -> f64 {
        self.base - self.bumps.iter().map(|b| b.amplitude.abs()).sum::<f64>()
    }

    /// Upper bound of `sup|ψ|`.
    pub fn sup_norm(&self) -> f64 {
        self.base.abs() + self.bumps.iter().map(|b| b.amplitude.abs()).sum::<f64>()
    }

    /// Largest sup norm among derivatives of order at most `k` (k ≤ 2).
    pub fn c_norm(&self, k: usize) -> f64 {
        let mut n = self.sup_norm();
        for j in 1..=k.min(2) {
            n = n.max(self.norms[j]);
        }
        n
    }

    /// `∫ψ dm / m(SM)` computed by deterministic quadrature of each bump.
    pub fn exact_mean(&self) -> f64 {
        let vol = self.surface.volume();
        self.base + self.bumps.iter().map(|b| b.amplitude * bump_integral(b.radius) / vol).sum::<f64>()
    }
}

/// A translated bump center `γc`.
#[derive(Debug, Clone, Copy)]
struct Translate {
    /// `(γc)⁻¹` as matrix entries.
    inverse: [f64; 4],
    /// Base point of `γc` on the hyperboloid.
    center: [f64; 3],
    /// `cosh` of the base radius of the support, padded for rounding.
    cosh_reach: f64,
}

/// Hyperboloid coordinates of the base point `g·i`, from `g gᵀ`.
fn hyperboloid(g: &[f64; 4]) -> [f64; 3] {
    let [a, b, c, d] = *g;
    [0.5 * (a * a + b * b + c * c + d * d), 0.5 * (a * a + b * b - c * c - d * d), a * c + b * d]
}

/// `cosh` of the distance between two hyperboloid points.
fn minkowski(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    p[0] * q[0] - p[1] * q[1] - p[2] * q[2]
}

/// Enumerates all `γc` within `circumradius + margin + support` of
/// `i`, where `c` is the reduced center.
fn orbit_translates(surface: &Surface, center: &GroupElement, support: f64, margin: f64) -> Result<Vec<Translate>> {
    let c0 = surface.domain.reduce_frame(center)?;
    let reach = surface.group.circumradius + margin + support + 1e-6;
    let search = reach + 2.0 * surface.group.circumradius;
    let key = |g: &GroupElement| {
        let e = g.entries();
        [(e[0] * 1e6).round() as i64, (e[1] * 1e6).round() as i64, (e[2] * 1e6).round() as i64, (e[3] * 1e6).round() as i64]
    };
    let mut seen: HashMap<[i64; 4], ()> = HashMap::new();
    let mut frontier = vec![GroupElement::IDENTITY];
    seen.insert(key(&GroupElement::IDENTITY), ());
    let mut out = Vec::new();
    while let Some(g) = frontier.pop() {
        let gc = g * c0;
        if (0.5 * gc.norm_sq()).acosh() <= reach {
            out.push(gc);
        }
        for w in &surface.domain.walls {
            let n = *w * g;
            if (0.5 * n.norm_sq()).max(1.0).acosh() <= search && seen.insert(key(&n), ()).is_none() {
                frontier.push(n);
            }
        }
    }
    out.sort_by(|a, b| a.norm_sq().partial_cmp(&b.norm_sq()).unwrap());
    let cosh_reach = (support + 1e-9).cosh() * (1.0 + 1e-12);
    Ok(out
        .iter()
        .map(|g| Translate { inverse: g.inverse().entries(), center: hyperboloid(&g.entries()), cosh_reach })
        .collect())
}

/// Sup norms of first and second derivatives, from a dense grid over each
/// bump's support, summed over bumps and inflated by 10%.
fn derivative_sups(bumps: &[Bump]) -> [f64; 3] {
    let mut first = 0.0;
    let mut second = 0.0;
    for b in bumps {
        let (mut s1, mut s2) = (0.0f64, 0.0f64);
        let rho2 = b.radius * b.radius;
        let rb = b.base_radius();
        let (nr, na) = (48, 36);
        for i in 0..=nr {
            let r = rb * i as f64 / nr as f64;
            for j in 0..na {
                let phi = 2.0 * PI * j as f64 / na as f64;
                for k in 0..na {
                    let theta = 2.0 * PI * k as f64 / na as f64;
                    let h = (rotation(phi) * translation(r) * rotation(theta)).entries();
                    for x in Direction::ALL {
                        s1 = s1.max(bump_term(&h, b.amplitude, rho2, Derivative::First(x)).abs());
                        for y in Direction::ALL {
                            s2 = s2.max(bump_term(&h, b.amplitude, rho2, Derivative::Second(x, y)).abs());
                        }
                    }
                }
            }
        }
        first += 1.1 * s1;
        second += 1.1 * s2;
    }
    [0.0, first, second]
}

/// Haar integral of the unit-amplitude bump of radius `rho`.
///
/// In coordinates `h = R(φ) A(r) R(θ)` the Haar measure is `sinh r dr dφ dθ`
/// and `|h ∓ I|² = 2 cosh r + 2 ∓ 4 cosh(r/2) cos((φ+θ)/2)`, so the integral
/// reduces to `2π ∫∫ e(q(r,s)/ρ²) sinh r ds dr`.
pub fn bump_integral(rho: f64) -> f64 {
    let rb = support_base_radius(rho);
    let rho2 = rho * rho;
    let ns = 2048;
    let (nodes, weights) = crate::quadrature::gauss_legendre(24);
    let panels = 64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = rb * p as f64 / panels as f64;
        let b = rb * (p + 1) as f64 / panels as f64;
        for (x, w) in nodes.iter().zip(&weights) {
            let r = 0.5 * (a + b) + 0.5 * (b - a) * x;
            let (ch, chh) = (r.cosh(), (0.5 * r).cosh());
            let mut inner = 0.0;
            for k in 0..ns {
                let s = 2.0 * PI * k as f64 / ns as f64;
                let c = (0.5 * s).cos();
                let q = (2.0 * ch + 2.0 - 4.0 * chh * c).min(2.0 * ch + 2.0 + 4.0 * chh * c);
                inner += profile(q / rho2).0;
            }
            inner *= 2.0 * PI / ns as f64;
            total += 0.5 * (b - a) * w * r.sinh() * inner;
        }
    }
    2.0 * PI * total
}

/// One Haar-distributed frame based in the domain, drawn from `rng`, with the
/// number of rejected proposals.
fn draw_frame(surface: &Surface, rng: &mut ChaCha8Rng) -> (GroupElement, usize) {
    let cosh_r = surface.group.circumradius.cosh();
    let mut rejected = 0;
    loop {
        let u: f64 = rng.gen();
        let phi: f64 = rng.gen::<f64>() * 2.0 * PI;
        let theta: f64 = rng.gen::<f64>() * 2.0 * PI;
        let r = (1.0 + u * (cosh_r - 1.0)).acosh();
        let g = rotation(phi) * translation(r) * rotation(theta);
        if surface.domain.contains(&g) {
            return (g, rejected);
        }
        rejected += 1;
    }
}

/// Random stream for shard `shard` of a run seeded with `seed`.
pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// `n` Liouville-distributed frames in the domain. The output depends only on
/// `(n, seed)`, not on the number of threads.
pub fn liouville_sample(surface: &Surface, n: usize, seed: u64) -> Result<Vec<GroupElement>> {
    if n == 0 {
        return Err(Error::Domain("sample count"));
    }
    let shards = n.div_ceil(SHARD);
    let chunks: Vec<(Vec<GroupElement>, usize)> = par::map_indexed(shards, |s| {
        let mut rng = shard_rng(seed, s as u64);
        let count = SHARD.min(n - s * SHARD);
        let mut out = Vec::with_capacity(count);
        let mut rejected = 0;
        for _ in 0..count {
            let (g, r) = draw_frame(surface, &mut rng);
            rejected += r;
            out.push(g);
        }
        (out, rejected)
    });
    let rejected: usize = chunks.iter().map(|c| c.1).sum();
    let efficiency = n as f64 / (n + rejected) as f64;
    if efficiency < 1e-3 {
        return Err(Error::SamplerEfficiency(efficiency));
    }
    Ok(chunks.into_iter().flat_map(|c| c.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octagon_relation_and_traces() {
        let g = FuchsianGroup::octagon().unwrap();
        assert!(g.relation_residual() < 1e-9);
        let t0 = g.generators[0].trace().abs();
        for x in &g.generators {
            assert!((x.trace().abs() - t0).abs() < 1e-12);
            assert!(x.trace().abs() > 2.0);
        }
    }

    #[test]
    fn profile_derivatives_match_differences() {
        for u in [0.1, 0.5, 0.9] {
            let h = 1e-6;
            let (_, d1, d2) = profile(u);
            let fd1 = (profile(u + h).0 - profile(u - h).0) / (2.0 * h);
            let fd2 = (profile(u + h).1 - profile(u - h).1) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-7 * (1.0 + d1.abs()));
            assert!((d2 - fd2).abs() < 1e-6 * (1.0 + d2.abs()));
        }
    }
}
