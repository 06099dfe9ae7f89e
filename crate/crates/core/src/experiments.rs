//! Monte Carlo estimators and verification sweeps.
//!
//! Every sweep returns an [`ExperimentReport`]: typed tables for the CSV
//! output, named PASS/FAIL checks, and an optional plot. Sweeps depend only on
//! the observable, the [`Settings`] and the seed, never on thread count.

use std::f64::consts::PI;

use rand::Rng;

use crate::boundary::{self, holonomy_circuit, BasePoint, BoundaryPoint, Leaf};
use crate::error::{Error, Result};
use crate::forms::{
    alpha_psi, cb_value, contact_volume, contact_volume_fd, line_integral_with, reeb_defect, reeb_pairing, stokes_tiling,
    Coefficient, FrameOneForm, Rule, SegmentPath,
};
use crate::fuchsian::{frame_at, liouville_sample, shard_rng, Derivative, InvariantObservable, Surface};
use crate::lie::{
    approximate_quintuple, flow_unchecked, holonomy_closure_check, quadrilateral_close, AlgebraVector, Generator, GroupElement,
};
use crate::par;
use crate::reparam::{
    busemann_psi, busemann_psi_unstable, cross_ratio_psi, cross_ratio_psi_at, h_delta, orbit_integral, parry_cocycle,
    psi_circuit, reparam_flow, reparam_time, stable_pair, tau_delta, tau_delta_truncated, unstable_pair, QuadratureSpec,
    Quadrilateral, Route, Side,
};

/// Stream offsets separating the random draws of different sweeps from the
/// Liouville sampler's shard streams.
const STREAM_PROBE: u64 = 1 << 40;
const STREAM_CONFIG: u64 = 2 << 40;
const STREAM_BALL: u64 = 3 << 40;
const STREAM_GRID: u64 = 4 << 40;

/// Node spacing for orbit integrals of second derivatives of `ψ`.
pub const DERIVATIVE_STEP: f64 = 0.0025;

/// Sweep parameters. Defaults are the acceptance settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    /// Extra seeds for seed-to-seed consistency checks.
    pub seeds: Vec<u64>,
    pub tail_tol: f64,
    pub max_t: f64,
    /// Tail tolerance for the Monte Carlo mean-zero sweep.
    pub mc_tail_tol: f64,
    /// δ grid for the main theorem and the two-route comparison.
    pub deltas: Vec<f64>,
    pub mean_zero_deltas: Vec<f64>,
    /// Monte Carlo sample count.
    pub n: usize,
    /// Number of test frames.
    pub m: usize,
    /// Random configurations for the circuit checks.
    pub configs: usize,
    pub t_grid: Vec<f64>,
    pub drift_delta: f64,
    pub drift_times: Vec<f64>,
    pub stokes_side: f64,
    pub stokes_tiles: Vec<f64>,
    pub density_times: Vec<f64>,
    pub density_n: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            seed: 1,
            seeds: vec![2, 3],
            tail_tol: 1e-10,
            max_t: 60.0,
            mc_tail_tol: 1e-8,
            deltas: vec![0.08, 0.04, 0.02],
            mean_zero_deltas: vec![0.1, 0.05],
            n: 100_000,
            m: 50,
            configs: 20,
            t_grid: (1..=8).map(f64::from).collect(),
            drift_delta: 0.02,
            drift_times: vec![1.0, 5.0],
            stokes_side: 0.2,
            stokes_tiles: vec![0.04, 0.02, 0.01],
            density_times: vec![0.0, 2.0, 4.0, 8.0],
            density_n: 2000,
        }
    }
}

impl Settings {
    /// Quadrature for quantities at scale `δ`.
    pub fn spec(&self, delta: f64) -> QuadratureSpec {
        QuadratureSpec { tail_tol: self.tail_tol, max_t: self.max_t, ..QuadratureSpec::for_delta(delta) }
    }

    pub fn base_spec(&self) -> QuadratureSpec {
        QuadratureSpec { tail_tol: self.tail_tol, max_t: self.max_t, ..QuadratureSpec::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Int,
    Float,
    Text,
}

impl ColumnType {
    pub fn name(self) -> &'static str {
        match self {
            ColumnType::Int => "int",
            ColumnType::Float => "float",
            ColumnType::Text => "text",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<(String, ColumnType)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[(&str, ColumnType)]) -> Self {
        Self { name: name.to_string(), columns: columns.iter().map(|(n, t)| (n.to_string(), *t)).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Float columns only: a table of `(name, values)`.
fn float_table(name: &str, columns: &[&str]) -> Table {
    let cols: Vec<(&str, ColumnType)> = columns.iter().map(|c| (*c, ColumnType::Float)).collect();
    Table::new(name, &cols)
}

/// A named comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub relation: &'static str,
    pub threshold: f64,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.to_string(), passed: value <= threshold, value, relation: "<=", threshold }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.to_string(), passed: value >= threshold, value, relation: ">=", threshold }
    }

    pub fn above(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.to_string(), passed: value > threshold, value, relation: ">", threshold }
    }

    pub fn line(&self, experiment: &str) -> String {
        format!(
            "{} {}: {}: {:.6e} {} {:.6e}",
            if self.passed { "PASS" } else { "FAIL" },
            experiment,
            self.name,
            self.value,
            self.relation,
            self.threshold
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: Vec<(String, String)>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub summary: Vec<(String, f64)>,
    pub plot: Option<Plot>,
}

impl ExperimentReport {
    pub fn new(name: &str) -> Self {
        Self { name: name.to_string(), parameters: Vec::new(), tables: Vec::new(), checks: Vec::new(), summary: Vec::new(), plot: None }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.push((key.to_string(), value.to_string()));
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn stat(&mut self, key: &str, value: f64) {
        self.summary.push((key.to_string(), value));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn find(&self, check: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == check)
    }

    /// Appends another report's tables and checks under a name prefix.
    pub fn absorb(&mut self, other: ExperimentReport) {
        for mut t in other.tables {
            t.name = format!("{}.{}", other.name, t.name);
            self.tables.push(t);
        }
        for mut c in other.checks {
            c.name = format!("{}.{}", other.name, c.name);
            self.checks.push(c);
        }
        for (k, v) in other.summary {
            self.summary.push((format!("{}.{}", other.name, k), v));
        }
        self.parameters.extend(other.parameters);
    }
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Sample mean and standard error.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `x / scale`, with `0/0 = 0` for noise-free estimates.
fn ratio_or_zero(x: f64, scale: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x / scale
    }
}

/// Least-squares line `y = a + b x`: returns `(b, a, stderr of b)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let se = if xs.len() > 2 {
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (b, a, se)
}

/// Slope of `log y` against `log x`.
pub fn fitted_order(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    fit_line(&lx, &ly).0
}

fn collect<T>(v: Vec<Result<T>>) -> Result<Vec<T>> {
    v.into_iter().collect()
}

/// Deterministic test frames. Even indices are Liouville samples; odd ones
/// lie inside the support of a bump (cycling through the bumps), so that
/// identities are exercised where `ψ` is not locally constant.
pub fn probe_frames(psi: &InvariantObservable, m: usize, seed: u64) -> Result<Vec<GroupElement>> {
    let surface = psi.surface();
    let uniform = liouville_sample(surface, m.max(1), seed ^ 0x5eed)?;
    let active: Vec<_> = psi.bumps.iter().filter(|b| b.amplitude != 0.0).collect();
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        if k % 2 == 0 || active.is_empty() {
            out.push(uniform[k]);
            continue;
        }
        let b = active[(k / 2) % active.len()];
        let mut rng = shard_rng(seed, STREAM_PROBE + k as u64);
        let s = b.radius / 3.0;
        let [a, z, c]: [f64; 3] = [rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s)];
        let g = flow_unchecked(&flow_unchecked(&flow_unchecked(&b.center, Generator::Unstable, a), Generator::Geodesic, z), Generator::Stable, c);
        out.push(surface.domain.reduce_frame(&g)?);
    }
    Ok(out)
}

/// Mean of `ψ` over `n` Liouville samples and its standard error.
pub fn estimate_mean(psi: &InvariantObservable, n: usize, seed: u64) -> Result<(f64, f64)> {
    if n < 1000 {
        return Err(Error::Domain("at least 1000 samples are needed for a mean estimate"));
    }
    let frames = liouville_sample(psi.surface(), n, seed)?;
    let vals = par::map_slice(&frames, |g| psi.evaluate_reduced(g, Derivative::Value));
    Ok(mean_stderr(&vals))
}

/// Closed-form quadrilateral sides, holonomy closure and the window of the
/// approximate quintuple.
pub fn verify_quadrilateral(surface: &Surface, s: &Settings) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("verify-quadrilateral");
    rep.param("seed", s.seed);
    let frames = liouville_sample(surface, 100, s.seed)?;
    let mut table = float_table("sides", &["delta", "delta3_exact", "delta4_exact", "delta5", "holonomy_gap", "approx_quintuple_gap"]);
    let (mut side_err, mut hol, mut window): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for delta in [0.1, 0.01, 0.001] {
        let q = quadrilateral_close(delta, delta)?;
        let d2 = delta * delta;
        side_err = side_err.max((q.d3 + delta / (1.0 + d2)).abs()).max((q.d4 + delta * (1.0 + d2)).abs());
        let gap = frames.iter().map(|f| holonomy_closure_check(f, &q)).fold(0.0, f64::max);
        let approx = approximate_quintuple(delta);
        let approx_gap = frames.iter().map(|f| holonomy_closure_check(f, &approx)).fold(0.0, f64::max);
        hol = hol.max(gap);
        window = window.max(approx_gap / (2.0 * delta.powi(3)));
        table.push(vec![delta.into(), q.d3.into(), q.d4.into(), q.d5.into(), gap.into(), approx_gap.into()]);
    }
    rep.tables.push(table);
    rep.check(Check::at_most("closed-form sides", side_err, 1e-13));
    rep.check(Check::at_most("holonomy gap", hol, 1e-12));
    rep.check(Check::at_most("approximate quintuple gap / 2 delta^3", window, 1.0));
    Ok(rep)
}

/// A hyperbolic element with translation length `len` whose axis passes
/// near the frame `(x, y, θ)`.
fn hyperbolic(x: f64, y: f64, theta: f64, len: f64) -> GroupElement {
    let h = frame_at(x, y, theta);
    h * flow_unchecked(&GroupElement::IDENTITY, Generator::Geodesic, len) * h.inverse()
}

/// Boundary points of a circuit around `v`: `(ξ, ξ', η, η')` with `ξ → η` the
/// geodesic of `v`.
fn circuit_points(v: &GroupElement, a: f64, b: f64) -> [BoundaryPoint; 4] {
    let (xi, eta) = v.endpoints();
    let xi2 = flow_unchecked(v, Generator::Stable, a).endpoints().0;
    let eta2 = flow_unchecked(v, Generator::Unstable, b).endpoints().1;
    [xi, xi2, eta, eta2]
}

fn random_circuits(psi: &InvariantObservable, s: &Settings) -> Result<Vec<(GroupElement, [BoundaryPoint; 4])>> {
    let frames = probe_frames(psi, s.configs, s.seed)?;
    Ok(frames
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            let mut rng = shard_rng(s.seed, STREAM_CONFIG + k as u64);
            let sign = |r: &mut rand_chacha::ChaCha8Rng| if r.gen::<bool>() { 1.0 } else { -1.0 };
            let a = sign(&mut rng) * rng.gen_range(0.05..0.4);
            let b = sign(&mut rng) * rng.gen_range(0.05..0.4);
            (v, circuit_points(&v, a, b))
        })
        .collect())
}

/// Cross-ratio spectrum identity and the dynamical circuits for the
/// geodesic and the time-changed flow.
pub fn verify_cross_ratio(psi: &InvariantObservable, s: &Settings) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("verify-cross-ratio");
    rep.param("seed", s.seed);
    rep.param("configs", s.configs);
    let spec = s.base_spec();

    let mut spectrum = float_table("spectrum", &["length", "cross_ratio", "error"]);
    let mut worst: f64 = 0.0;
    let mut rng = shard_rng(s.seed, STREAM_CONFIG);
    let words = psi.surface().group.word_ball(2);
    for k in 0..s.configs {
        let g = if k % 2 == 0 {
            hyperbolic(rng.gen_range(-1.0..1.0), rng.gen_range(0.3..3.0), rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.2..4.0))
        } else {
            words[1 + rng.gen_range(0..words.len() - 1)].1
        };
        let (minus, plus, len) = boundary::axis(&g)?;
        let eta = BoundaryPoint::Finite(rng.gen_range(-5.0..5.0));
        let cr = boundary::cross_ratio(minus, plus, g.act(eta), eta)?;
        worst = worst.max((cr - 2.0 * len).abs());
        spectrum.push(vec![len.into(), cr.into(), (cr - 2.0 * len).into()]);
    }
    let e = std::f64::consts::E;
    let worked = boundary::cross_ratio(BoundaryPoint::Finite(0.0), BoundaryPoint::Infinity, BoundaryPoint::Finite(e), BoundaryPoint::Finite(1.0))?;
    rep.tables.push(spectrum);
    rep.check(Check::at_most("spectrum identity", worst, 1e-9));
    rep.check(Check::at_most("worked value [0,inf,e,1] - 2", (worked - 2.0).abs(), 1e-12));

    let configs = random_circuits(psi, s)?;
    let rows = par::map_slice(&configs, |(v, [xi, xi2, eta, eta2])| -> Result<[f64; 4]> {
        let c = holonomy_circuit(*xi, *xi2, *eta, *eta2, Some(*v))?;
        let cr = boundary::cross_ratio(*xi, *xi2, *eta, *eta2)?;
        let pc = psi_circuit(psi, *xi, *xi2, *eta, *eta2, Some(*v), &spec)?;
        let crp = cross_ratio_psi(psi, *xi, *xi2, *eta, *eta2, &spec)?;
        Ok([c.time, -cr, pc.time, -crp])
    });
    let mut circuits = float_table("circuits", &["circuit_time", "minus_cross_ratio", "psi_circuit_time", "minus_psi_cross_ratio"]);
    let (mut geo, mut tc): (f64, f64) = (0.0, 0.0);
    for r in collect(rows)? {
        geo = geo.max((r[0] - r[1]).abs());
        tc = tc.max((r[2] - r[3]).abs());
        circuits.push(r.iter().map(|x| Cell::Float(*x)).collect());
    }
    rep.tables.push(circuits);
    rep.check(Check::at_most("geodesic circuit vs cross ratio", geo, 1e-9));
    rep.check(Check::at_most("time-changed circuit vs cross ratio", tc, 1e-7));
    Ok(rep)
}

/// Every operation with `ψ ≡ c` against `c` times its geodesic counterpart.
pub fn constant_degeneration(surface: &std::sync::Arc<Surface>, c: f64, s: &Settings) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("degeneration");
    rep.param("constant", c);
    let psi = InvariantObservable::constant(surface.clone(), c)?;
    let delta = 0.04;
    let spec = s.spec(delta);
    let frames = liouville_sample(surface, 10, s.seed)?;
    let mut errs: Vec<(&str, f64)> = Vec::new();
    let mut note = |name: &'static str, e: f64| match errs.iter_mut().find(|x| x.0 == name) {
        Some(x) => x.1 = x.1.max(e),
        None => errs.push((name, e)),
    };
    let ap = alpha_psi();
    for (k, v) in frames.iter().enumerate() {
        let t = 0.5 + k as f64 * 0.3;
        note("reparam_time", (reparam_time(&psi, v, t)? - t / c).abs());
        note("parry_cocycle", parry_cocycle(&psi, v, Side::Plus, &spec)?.abs().max(parry_cocycle(&psi, v, Side::Minus, &spec)?.abs()));
        let p = v.base_point();
        let q = frames[(k + 1) % frames.len()].base_point();
        let xi = BoundaryPoint::Finite(-2.0 + 0.4 * k as f64);
        let b = boundary::busemann(p, q, xi)?;
        note("busemann_psi", (busemann_psi(&psi, p, q, xi, &spec)? - c * b).abs());
        note("busemann_psi_unstable", (busemann_psi_unstable(&psi, p, q, xi, &spec)? - c * b).abs());
        let [x1, x2, e1, e2] = circuit_points(v, 0.2, -0.3);
        let cr = boundary::cross_ratio(x1, x2, e1, e2)?;
        note("cross_ratio_psi", (cross_ratio_psi(&psi, x1, x2, e1, e2, &spec)? - c * cr).abs());
        note("psi_circuit", (psi_circuit(&psi, x1, x2, e1, e2, Some(*v), &spec)?.time + c * cr).abs());
        note("tau_delta", tau_delta(&psi, v, delta, &spec)?.total().abs().max(tau_delta_truncated(&psi, v, delta, &spec)?.total().abs()));
        let quad = Quadrilateral::new(v, delta)?;
        let d5 = quad.sides.d5;
        note("h_delta", (h_delta(&psi, v, delta, &spec, Route::Integral)? - c * d5).abs());
        note("h_delta cross ratio", (h_delta(&psi, v, delta, &spec, Route::CrossRatio)? - c * d5).abs());
        let path = SegmentPath::quadrilateral(&psi, &quad)?;
        note("line_integral", (line_integral_with(&psi, &ap, &path, Rule::Cocycle, &spec)? - c * d5).abs());
        note("line_integral quadrature", (line_integral_with(&psi, &ap, &path, Rule::Quadrature, &spec)? - c * d5).abs());
        note("reeb_defect", reeb_defect(&psi, v, 0.02, &spec)?);
        note("cb_value", cb_value(&psi, &FrameOneForm::ALPHA_PLUS, &ap, v, &spec)?.abs());
        let vol = contact_volume(&psi, &FrameOneForm::ALPHA, v, &spec)?;
        note("contact_volume", (contact_volume(&psi, &ap, v, &spec)? - c * c * vol).abs());
        note("reeb_pairing", (reeb_pairing(&psi, &ap, v, &spec)? - c).abs());
    }
    let st = stokes_tiling(&psi, &frames[0], 0.2, 0.04, c, &s.base_spec())?;
    note("stokes_residual", st.residual.abs());
    let mut table = Table::new("operations", &[("operation", ColumnType::Text), ("max_error", ColumnType::Float)]);
    let worst = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    for (name, e) in &errs {
        table.push(vec![(*name).into(), (*e).into()]);
    }
    rep.tables.push(table);
    rep.check(Check::at_most("constant observable sweep", worst, 1e-9));
    Ok(rep)
}

/// Time-changed Busemann functions, the time change itself, cross-ratio
/// invariances and the constant-observable sweep.
pub fn verify_busemann(psi: &InvariantObservable, s: &Settings) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("verify-busemann");
    rep.param("seed", s.seed);
    let spec = s.base_spec();
    let fine = QuadratureSpec { step: 1e-3, ..spec };
    let frames = probe_frames(psi, s.configs, s.seed)?;
    let rows = par::map_indexed(frames.len(), |k| -> Result<[f64; 5]> {
        let v = frames[k];
        let p = v.base_point();
        let q = frames[(k + 1) % frames.len()].base_point();
        let xi = v.endpoints().1;
        // Level set: flowing from q toward ξ for the time-changed Busemann
        // value lands on the horocycle through p.
        let w = boundary::frame_toward(q, xi)?;
        let b = busemann_psi(psi, p, q, xi, &spec)?;
        let q2 = reparam_flow(psi, &w, b)?.base_point();
        let level = busemann_psi(psi, p, q2, xi, &spec)?.abs();
        // Time change: t = ∫_0^{σ(t)} ψ.
        let t = 0.5 + 0.25 * k as f64;
        let sigma = reparam_time(psi, &v, t)?;
        let time = (orbit_integral(psi, &v, sigma, &fine)? - t).abs();
        let group = reparam_flow(psi, &v, t + 0.7)?.distance(&reparam_flow(psi, &reparam_flow(psi, &v, t)?, 0.7)?);
        let [x1, x2, e1, e2] = circuit_points(&v, 0.3, -0.2);
        let c0 = cross_ratio_psi(psi, x1, x2, e1, e2, &spec)?;
        let c1 = cross_ratio_psi_at(psi, BasePoint { x: 0.7, y: 1.9 }, x1, x2, e1, e2, &spec)?;
        let degenerate = cross_ratio_psi(psi, x1, x2, e1, e1, &spec)?.abs();
        Ok([level, time, group, (c0 - c1).abs(), degenerate])
    });
    let mut table = float_table("identities", &["level_set", "time_identity", "group_property", "base_point_shift", "degenerate"]);
    let mut worst = [0.0f64; 5];
    for r in collect(rows)? {
        for i in 0..5 {
            worst[i] = worst[i].max(r[i]);
        }
        table.push(r.iter().map(|x| Cell::Float(*x)).collect());
    }
    rep.tables.push(table);
    rep.check(Check::at_most("level-set invariance", worst[0], 1e-7));
    rep.check(Check::at_most("time identity", worst[1], 1e-9));
    rep.check(Check::at_most("group property", worst[2], 1e-9));
    rep.check(Check::at_most("base-point independence", worst[3], 1e-7));
    rep.check(Check::at_most("degenerate cross ratio", worst[4], 1e-12));
    rep.absorb(constant_degeneration(psi.surface(), 1.7, s)?);
    Ok(rep)
}

/// Parry cocycles, the kernel of `α_ψ`, the two routes to `h_δ` and the
/// truncation and drift bounds.
pub fn verify_parry(psi: &InvariantObservable, s: &Settings) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("verify-parry");
    rep.param("seed", s.seed);
    rep.param("deltas", list(&s.deltas));
    let spec = s.base_spec();
    let c1 = psi.c_norm(1);
    let c2 = psi.c_norm(2);
    let frames = probe_frames(psi, s.configs, s.seed)?;
    let ap = alpha_psi();

    // Truncation at T and at 2T.
    // A fine step keeps the quadrature error below the tail being compared.
    let fine = QuadratureSpec { step: 0.002, ..spec };
    let t1 = fine.truncation_time(1.0, c1)?;
    let fine2 = fine.with_tol(c1 * (-2.0 * t1).exp());
    let r = 1e-3;
    let rows = par::map_slice(&frames, |v| -> Result<[f64; 7]> {
        let hp = parry_cocycle(psi, v, Side::Plus, &spec)?;
        let hm = parry_cocycle(psi, v, Side::Minus, &spec)?;
        let trunc_plus = parry_cocycle(psi, v, Side::Plus, &fine)? - parry_cocycle(psi, v, Side::Plus, &fine2)?;
        let trunc_minus = parry_cocycle(psi, v, Side::Minus, &fine)? - parry_cocycle(psi, v, Side::Minus, &fine2)?;
        let trunc = trunc_plus.abs().max(trunc_minus.abs());
        // Difference quotients along the own horocycle.
        let dq_plus = (hp - stable_pair(psi, v, r, &spec)? / r).abs();
        let dq_minus = (hm + unstable_pair(psi, v, r, &spec)? / r).abs();
        // Kernel: α_ψ(X± + h± Z/ψ) and α_ψ(Z/ψ).
        let val = psi.value(v)?;
        let kp = ap.apply(psi, v, &AlgebraVector::new(0.0, 0.5 * hp / val, 1.0), &spec)?.abs();
        let km = ap.apply(psi, v, &AlgebraVector::new(1.0, 0.5 * hm / val, 0.0), &spec)?.abs();
        let norm = (ap.apply(psi, v, &AlgebraVector::new(0.0, 0.5 / val, 0.0), &spec)? - 1.0).abs();
        // Tangent of the time-changed stable leaf by centered differences.
        let h = 1e-3;
        let leaf = |x: f64| -> Result<GroupElement> {
            reparam_flow(psi, &flow_unchecked(v, Generator::Stable, x), stable_pair(psi, v, x, &spec)?)
        };
        let (a, b) = ((v.inverse() * leaf(h)?).entries(), (v.inverse() * leaf(-h)?).entries());
        let d = [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h), (a[2] - b[2]) / (2.0 * h), (a[3] - b[3]) / (2.0 * h)];
        let tangent = AlgebraVector::from_matrix([[d[0], d[1]], [d[2], d[3]]]);
        let tangency = ap.apply(psi, v, &tangent, &spec)?.abs();
        Ok([trunc, dq_plus, dq_minus, kp.max(km), norm, tangency, hp.abs().max(hm.abs())])
    });
    let mut cocycles =
        float_table("cocycles", &["truncation_gap", "quotient_plus", "quotient_minus", "kernel", "normalization", "leaf_tangency", "max_cocycle"]);
    let mut worst = [0.0f64; 7];
    for row in collect(rows)? {
        for i in 0..7 {
            worst[i] = worst[i].max(row[i]);
        }
        cocycles.push(row.iter().map(|x| Cell::Float(*x)).collect());
    }
    rep.tables.push(cocycles);
    rep.check(Check::at_most("truncation T vs 2T", worst[0], (-t1).exp() * c1));
    rep.check(Check::at_most("difference quotient h+", worst[1], c2 * r));
    rep.check(Check::at_most("difference quotient h-", worst[2], c2 * r));
    rep.check(Check::at_most("kernel of alpha_psi", worst[3], 1e-8));
    rep.check(Check::at_most("normalization alpha_psi(Z_psi)", worst[4], 1e-12));
    rep.check(Check::at_most("stable leaf tangent in kernel", worst[5], 1e-6));

    rep.absorb(two_route(psi, s)?);
    rep.absorb(drift_bounds(psi, s)?);
    Ok(rep)
}

/// `h_δ` by leaf integrals against `h_δ` by the time-changed cross ratio.
pub fn two_route(psi: &InvariantObservable, s: &Settings) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("two-route");
    let frames = probe_frames(psi, s.configs, s.seed)?;
    let mut table = float_table("h_delta", &["delta", "integral", "cross_ratio", "difference"]);
    let mut worst: f64 = 0.0;
    for &delta in &s.deltas {
        let spec = s.spec(delta);
        let rows = par::map_slice(&frames, |v| -> Result<[f64; 2]> {
            Ok([h_delta(psi, v, delta, &spec, Route::Integral)?, h_delta(psi, v, delta, &spec, Route::CrossRatio)?])
        });
        for [a, b] in collect(rows)? {
            worst = worst.max((a - b).abs());
            table.push(vec![delta.into(), a.into(), b.into(), (a - b).into()]);
        }
    }
    rep.tables.push(table);
    rep.check(Check::at_most("integral vs cross-ratio route", worst, 1e-6));
    Ok(rep)
}

/// Truncation gap of `τ_δ` and the drift of `τ_δ` and `h_δ` along the flow.
///
/// The drift bounds are stated with the δ² scale of the quadrilateral's flow
/// side; here that scale is `δ5`, so `(τ(f^T v) − τ(v))/δ5 + ψ(f^T v) − ψ(v)`
/// is bounded by `2(e^{|ψ|} + 4|ψ|_{C¹})|T|δ` and `|h(f^T v) − h(v)|` by
/// `4(e^{|ψ|} + 4|ψ|_{C¹})|T|δ·|δ5|`. The τ bound is checked at the
/// shortest time of the grid.
pub fn drift_bounds(psi: &InvariantObservable, s: &Settings) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("drift");
    let delta = s.drift_delta;
    rep.param("drift_delta", delta);
    rep.param("drift_times", list(&s.drift_times));
    let spec = s.spec(delta);
    let (c0, c1) = (psi.sup_norm(), psi.c_norm(1));
    let d5 = quadrilateral_close(delta, delta)?.d5;
    let frames = probe_frames(psi, s.m, s.seed)?;
    let k = c0.exp() + 4.0 * c1;
    let times = s.drift_times.clone();
    // The τ drift bound is checked at the shortest time only.
    let t_inv = times.iter().map(|t| t.abs()).fold(f64::INFINITY, f64::min);
    let rows = par::map_slice(&frames, |v| -> Result<Vec<[f64; 4]>> {
        let tau = tau_delta(psi, v, delta, &spec)?.total();
        let bar = tau_delta_truncated(psi, v, delta, &spec)?.total();
        let h = tau + orbit_integral(psi, v, d5, &spec)?;
        let pv = psi.value(v)?;
        let mut out = Vec::new();
        for &t in &times {
            let w = flow_unchecked(v, Generator::Geodesic, t);
            let tau_w = tau_delta(psi, &w, delta, &spec)?.total();
            let h_w = tau_w + orbit_integral(psi, &w, d5, &spec)?;
            let inv = ((tau_w - tau) / d5 + psi.value(&w)? - pv).abs();
            out.push([t, (bar - tau).abs(), inv, (h_w - h).abs()]);
        }
        Ok(out)
    });
    let mut table = float_table("bounds", &["T", "truncation_gap", "tau_drift", "h_drift"]);
    let (mut trunc, mut inv, mut hd): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for r in collect(rows)?.into_iter().flatten() {
        trunc = trunc.max(r[1]);
        if r[0].abs() == t_inv {
            inv = inv.max(r[2] / (2.0 * k * r[0].abs() * delta));
        }
        hd = hd.max(r[3] / (4.0 * k * r[0].abs() * delta * d5.abs()));
        table.push(r.iter().map(|x| Cell::Float(*x)).collect());
    }
    rep.tables.push(table);
    rep.check(Check::at_most("truncation gap / 4|psi|_C1 delta^3", trunc / (4.0 * c1 * delta.powi(3)), 1.0));
    rep.check(Check::at_most("tau drift / bound", inv, 1.0));
    rep.check(Check::at_most("h_delta drift / bound", hd, 1.0));
    Ok(rep)
}

/// `max_v |h_δ(v)/δ5 − ψ̄|` along the δ grid, its fitted order, and the
/// oscillation of `h_δ` between nearby frames.
pub fn verify_main_theorem(psi: &InvariantObservable, s: &Settings) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("verify-main-theorem");
    rep.param("seed", s.seed);
    rep.param("n", s.n);
    rep.param("m", s.m);
    rep.param("deltas", list(&s.deltas));
    let (mean, se) = estimate_mean(psi, s.n, s.seed)?;
    rep.stat("mean", mean);
    rep.stat("mean_stderr", se);
    rep.stat("exact_mean", psi.exact_mean());
    for &other in &s.seeds {
        let (m2, se2) = estimate_mean(psi, s.n, other)?;
        let pooled = (se * se + se2 * se2).sqrt();
        rep.check(Check::at_most(&format!("|mean(seed {}) - mean(seed {other})| / pooled stderr", s.seed), ratio_or_zero((mean - m2).abs(), pooled), 3.0));
    }
    let frames = probe_frames(psi, s.m, s.seed)?;
    let c2 = psi.c_norm(2);
    let mut samples = Table::new(
        "samples",
        &[("delta", ColumnType::Float), ("frame", ColumnType::Int), ("h_delta", ColumnType::Float), ("ratio", ColumnType::Float), ("psi_at_frame", ColumnType::Float)],
    );
    let mut per_delta = float_table("deviation", &["delta", "max_deviation", "max_local_deviation", "max_oscillation_ratio"]);
    let mut devs = Vec::new();
    let mut osc_worst: f64 = 0.0;
    let mut grid = s.deltas.clone();
    grid.sort_by(|a, b| b.total_cmp(a));
    for &delta in &grid {
        let spec = s.spec(delta);
        let d5 = quadrilateral_close(delta, delta)?.d5;
        let t_delta = (delta * delta).recip().ln();
        let eps = delta * delta / t_delta;
        let osc_bound = 4.0 * delta * d5.abs() * c2;
        let rows = par::map_indexed(frames.len(), |k| -> Result<[f64; 3]> {
            let v = frames[k];
            let h = h_delta(psi, &v, delta, &spec, Route::Integral)?;
            // A frame at distance δ²/T_δ in a direction fixed by the index.
            let dir = [Generator::Unstable, Generator::Geodesic, Generator::Stable][k % 3];
            let w = flow_unchecked(&v, dir, eps);
            let hw = h_delta(psi, &w, delta, &spec, Route::Integral)?;
            Ok([h, psi.value(&v)?, (h - hw).abs() / osc_bound])
        });
        let (mut dev, mut local): (f64, f64) = (0.0, 0.0);
        for (k, [h, pv, osc]) in collect(rows)?.into_iter().enumerate() {
            let ratio = h / d5;
            dev = dev.max((ratio - mean).abs());
            local = local.max((ratio - pv).abs());
            osc_worst = osc_worst.max(osc);
            samples.push(vec![delta.into(), k.into(), h.into(), ratio.into(), pv.into()]);
        }
        devs.push(dev);
        per_delta.push(vec![delta.into(), dev.into(), local.into(), osc_worst.into()]);
    }
    let order = fitted_order(&grid, &devs);
    let monotone = devs.windows(2).map(|w| w[1] - w[0] - 3.0 * se).fold(f64::NEG_INFINITY, f64::max);
    rep.stat("fitted_order", order);
    rep.tables.push(per_delta);
    rep.tables.push(samples);
    rep.check(Check::at_least("fitted order of max deviation", order, 0.4));
    rep.check(Check::at_most("deviation increase beyond 3 stderr", monotone, 0.0));
    rep.check(Check::at_most("oscillation / 4 delta |delta5| |psi|_C2", osc_worst, 1.0));
    rep.plot = Some(Plot {
        title: "max deviation of h_delta/delta5 from the mean".into(),
        x_label: "delta".into(),
        y_label: "max |ratio - mean|".into(),
        log_x: true,
        log_y: true,
        series: vec![Series { label: "max deviation".into(), points: grid.iter().copied().zip(devs.iter().copied()).collect() }],
    });
    Ok(rep)
}

/// Monte Carlo mean of `τ_δ` and of its four leaf integrals, and the
/// horocycle-translate mean of `ψ`.
///
/// Each leaf integral has Liouville mean zero at every quadrature node, so
/// the check does not depend on the node spacing; the sweep uses spacing
/// 0.01 and the Monte Carlo tail tolerance.
pub fn mean_zero_check(psi: &InvariantObservable, s: &Settings) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("mean-zero");
    rep.param("seed", s.seed);
    rep.param("n", s.n);
    rep.param("deltas", list(&s.mean_zero_deltas));
    let spec = QuadratureSpec { step: 0.01, tail_tol: s.mc_tail_tol, max_t: s.max_t };
    let frames = liouville_sample(psi.surface(), s.n, s.seed)?;
    let mut table = float_table("means", &["delta", "tau_mean", "tau_stderr", "plus_mean", "plus_stderr", "minus_mean", "minus_stderr", "translate_mean", "translate_stderr"]);
    let exact = psi.exact_mean();
    for &delta in &s.mean_zero_deltas {
        let parts = par::map_slice(&frames, |v| -> Result<[f64; 3]> {
            let t = tau_delta(psi, v, delta, &spec)?;
            let moved = flow_unchecked(v, Generator::Stable, delta);
            Ok([t.plus, t.minus, psi.evaluate_near(&moved, Derivative::Value)])
        });
        let parts = collect(parts)?;
        let col = |i: usize| -> Vec<f64> { parts.iter().map(|p| p[i]).collect() };
        let tau: Vec<f64> = parts.iter().map(|p| p[0] + p[1]).collect();
        let (tm, ts) = mean_stderr(&tau);
        let (pm, ps) = mean_stderr(&col(0));
        let (mm, ms) = mean_stderr(&col(1));
        let (hm, hs) = mean_stderr(&col(2));
        table.push(vec![delta.into(), tm.into(), ts.into(), pm.into(), ps.into(), mm.into(), ms.into(), hm.into(), hs.into()]);
        rep.check(Check::at_most(&format!("|mean tau| / stderr at delta={delta}"), ratio_or_zero(tm.abs(), ts), 3.0));
        rep.check(Check::at_most(&format!("|mean tau+| / stderr at delta={delta}"), ratio_or_zero(pm.abs(), ps), 3.0));
        rep.check(Check::at_most(&format!("|mean tau-| / stderr at delta={delta}"), ratio_or_zero(mm.abs(), ms), 3.0));
        rep.check(Check::at_most(&format!("|translate mean - mean| / stderr at delta={delta}"), ratio_or_zero((hm - exact).abs(), hs), 3.0));
    }
    rep.tables.push(table);
    Ok(rep)
}

/// Frame `v` with `v·e^{(side/2)X-}·e^{(side/2)X+}` equal to the first active
/// bump center, so the tiled square is centered on the bump.
fn stokes_corner(psi: &InvariantObservable, side: f64) -> GroupElement {
    let center = psi.bumps.iter().find(|b| b.amplitude != 0.0).map_or(GroupElement::IDENTITY, |b| b.center);
    flow_unchecked(&flow_unchecked(&center, Generator::Stable, -0.5 * side), Generator::Unstable, -0.5 * side)
}

/// Tiled Stokes residuals, flow-tangent loops, the Reeb defect and `α_ψ`
/// over quadrilateral boundaries.
pub fn stokes_check(psi: &InvariantObservable, s: &Settings) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("stokes");
    rep.param("side", s.stokes_side);
    rep.param("tiles", list(&s.stokes_tiles));
    let spec = s.base_spec();
    let mean = psi.exact_mean();
    let corner = stokes_corner(psi, s.stokes_side);
    let mut tiling = float_table("tiling", &["delta_tile", "residual", "boundary_psi", "area", "telescoping_gap"]);
    let (mut res, mut tele) = (Vec::new(), 0.0f64);
    for &dt in &s.stokes_tiles {
        let st = stokes_tiling(psi, &corner, s.stokes_side, dt, mean, &spec)?;
        let gap = (st.tile_sum - st.boundary_psi).abs();
        tele = tele.max(gap);
        res.push(st.residual.abs());
        tiling.push(vec![dt.into(), st.residual.into(), st.boundary_psi.into(), st.area.into(), gap.into()]);
    }
    let order = fitted_order(&s.stokes_tiles, &res);
    rep.stat("stokes_order", order);
    rep.tables.push(tiling);
    rep.check(Check::at_least("residual order in delta_tile", order, 0.5));
    rep.check(Check::at_most("tile sum vs outer loop", tele, 1e-9));

    let frames = probe_frames(psi, 10, s.seed)?;
    let loop_spec = s.spec(0.02);
    let ap = alpha_psi();
    let rows = par::map_slice(&frames, |v| -> Result<[f64; 6]> {
        let mut circ: f64 = 0.0;
        for leaf in [Leaf::Stable, Leaf::Unstable] {
            let path = SegmentPath::flow_tangent_loop(psi, v, leaf, 0.05, 0.5)?;
            path.validate(psi, true)?;
            circ = circ.max(line_integral_with(psi, &ap, &path, Rule::Cocycle, &loop_spec)?.abs());
        }
        let d = [reeb_defect(psi, v, 0.04, &loop_spec)?, reeb_defect(psi, v, 0.02, &loop_spec)?, reeb_defect(psi, v, 0.01, &loop_spec)?];
        let delta = 0.04;
        let qspec = s.spec(delta);
        let quad = Quadrilateral::new(&psi.surface().domain.reduce_frame(v)?, delta)?;
        let path = SegmentPath::quadrilateral(psi, &quad)?;
        path.validate(psi, true)?;
        let by_quadrature = line_integral_with(psi, &ap, &path, Rule::Quadrature, &qspec)?;
        let h = h_delta(psi, v, delta, &qspec, Route::Integral)?;
        Ok([circ, d[0], d[1], d[2], (by_quadrature - h).abs(), (line_integral_with(psi, &FrameOneForm::ALPHA, &path, Rule::Cocycle, &qspec)? - quad.sides.d5).abs()])
    });
    let mut loops = float_table("loops", &["flow_tangent_circulation", "reeb_defect_0.04", "reeb_defect_0.02", "reeb_defect_0.01", "quadrilateral_vs_h_delta", "alpha_vs_delta5"]);
    let mut worst = [0.0f64; 6];
    for r in collect(rows)? {
        for i in 0..6 {
            worst[i] = worst[i].max(r[i]);
        }
        loops.push(r.iter().map(|x| Cell::Float(*x)).collect());
    }
    rep.tables.push(loops);
    rep.check(Check::at_most("flow-tangent circulation", worst[0], 1e-8));
    rep.check(Check::at_most("reeb defect at delta=0.02", worst[2], 1e-6));
    rep.check(Check::at_most("reeb defect growth 0.04 -> 0.01", worst[3] - worst[1], 1e-6));
    rep.check(Check::at_most("alpha_psi over quadrilateral vs h_delta", worst[4], 1e-8));
    rep.check(Check::at_most("alpha over quadrilateral vs delta5", worst[5], 1e-13));
    rep.plot = Some(Plot {
        title: "tiled Stokes residual".into(),
        x_label: "delta_tile".into(),
        y_label: "|residual|".into(),
        log_x: true,
        log_y: true,
        series: vec![Series { label: "residual".into(), points: s.stokes_tiles.iter().copied().zip(res.iter().copied()).collect() }],
    });
    Ok(rep)
}

/// CB criterion values, the affine-family volume identity against finite
/// differences, and the Reeb pairing.
pub fn cb_check(psi: &InvariantObservable, s: &Settings) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("cb-check");
    rep.param("seed", s.seed);
    rep.param("m", s.m);
    // Cocycle derivatives integrate second derivatives of ψ along orbits; at
    // node spacing 0.01 their quadrature error is near 1e-5.
    let spec = QuadratureSpec { step: DERIVATIVE_STEP, ..s.base_spec() };
    let frames = probe_frames(psi, s.m, s.seed)?;
    let ap = alpha_psi();
    // Integrable ψ·α⁺ deformed toward the contact form ψ·α.
    let foliation = FrameOneForm { minus: Coefficient::ZERO, zero: Coefficient::ZERO, plus: Coefficient::psi(1.0) };
    let beta = FrameOneForm { minus: Coefficient::ZERO, zero: Coefficient::psi(1.0), plus: Coefficient::ZERO };
    let rows = par::map_slice(&frames, |v| -> Result<[f64; 6]> {
        let smooth = cb_value(psi, &FrameOneForm::ALPHA_PLUS, &FrameOneForm::ALPHA, v, &spec)?.abs();
        let cb = cb_value(psi, &FrameOneForm::ALPHA_PLUS, &ap, v, &spec)?;
        let hm = parry_cocycle(psi, v, Side::Minus, &spec)?;
        let integrable = contact_volume(psi, &foliation, v, &spec)?.abs();
        let cross = cb_value(psi, &foliation, &beta, v, &spec)?;
        let top = contact_volume(psi, &beta, v, &spec)?;
        let mut affine: f64 = 0.0;
        for t in [0.1, 1.0] {
            let form = foliation.affine(1.0, &beta, t);
            let identity = t * (cross + t * top);
            let fd = contact_volume_fd(psi, &form, v, 1e-4, &spec)?;
            affine = affine.max((identity - fd).abs());
        }
        Ok([smooth, (cb + hm).abs(), integrable, affine, cb, -hm])
    });
    let mut table = float_table("cb", &["cb_alpha_plus_alpha", "cb_minus_h_gap", "foliation_volume", "affine_identity_gap", "cb_alpha_plus_alpha_psi", "minus_h_minus"]);
    let mut worst = [0.0f64; 4];
    for r in collect(rows)? {
        for i in 0..4 {
            worst[i] = worst[i].max(r[i]);
        }
        table.push(r.iter().map(|x| Cell::Float(*x)).collect());
    }
    rep.tables.push(table);
    rep.check(Check::at_most("cb(alpha+, alpha)", worst[0], 1e-14));
    rep.check(Check::at_most("cb(alpha+, alpha_psi) + h-", worst[1], 1e-6));
    rep.check(Check::at_most("foliation is integrable", worst[2], 1e-12));
    rep.check(Check::at_most("affine volume identity vs finite differences", worst[3], 1e-6));

    let mut pairing_frames = liouville_sample(psi.surface(), 1000, s.seed)?;
    pairing_frames.extend(frames.iter().copied());
    let rows = par::map_slice(&pairing_frames, |v| -> Result<[f64; 4]> {
        Ok([
            reeb_pairing(psi, &ap, v, &spec)?,
            (reeb_pairing(psi, &ap, v, &spec)? - psi.value(v)?).abs(),
            reeb_pairing(psi, &FrameOneForm::ALPHA_PLUS, v, &spec)?.abs(),
            (reeb_pairing(psi, &FrameOneForm::ALPHA, v, &spec)? - 1.0).abs(),
        ])
    });
    let rows = collect(rows)?;
    let min_pairing = rows.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min);
    let others = rows.iter().map(|r| r[1].max(r[2]).max(r[3])).fold(0.0, f64::max);
    rep.stat("min_reeb_pairing", min_pairing);
    rep.check(Check::above("min reeb pairing of alpha_psi", min_pairing, 0.0));
    rep.check(Check::at_most("reeb pairings equal psi, 0 and 1", others, 0.0));
    Ok(rep)
}

/// Correlations `C(t) = E[φ·φ∘f_ψ^t] − E[φ]E[φ∘f_ψ^t]` on the time grid, and
/// the decay rate fitted to `log|C|`.
pub fn mixing_probe(
    psi: &InvariantObservable,
    phi: &InvariantObservable,
    chi: &InvariantObservable,
    t_grid: &[f64],
    n: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("mixing");
    rep.param("seed", seed);
    rep.param("n", n);
    rep.param("t_grid", list(t_grid));
    let mut times = vec![0.0];
    times.extend(t_grid.iter().copied().filter(|t| *t > 0.0));
    times.sort_by(f64::total_cmp);
    times.dedup();
    let frames = liouville_sample(psi.surface(), n, seed)?;
    let domain = &psi.surface().domain;
    let rows = par::map_slice(&frames, |v| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(times.len() + 1);
        out.push(phi.evaluate_reduced(v, Derivative::Value));
        let mut w = *v;
        let mut at = 0.0;
        for &t in &times {
            if t > at {
                w = domain.reduce_frame(&reparam_flow(psi, &w, t - at)?)?;
                at = t;
            }
            out.push(chi.evaluate_reduced(&w, Derivative::Value));
        }
        Ok(out)
    });
    let rows = collect(rows)?;
    let a: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let (ma, _) = mean_stderr(&a);
    let mut table = float_table("correlations", &["t", "correlation", "stderr"]);
    let mut corr = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let b: Vec<f64> = rows.iter().map(|r| r[i + 1]).collect();
        let (mb, _) = mean_stderr(&b);
        let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).collect();
        let (c, se) = mean_stderr(&prod);
        corr.push((t, c, se));
        table.push(vec![t.into(), c.into(), se.into()]);
    }
    // C(0) against the direct covariance.
    let (_, cov_se) = mean_stderr(&a);
    let var = cov_se * cov_se * n as f64 * (n as f64 - 1.0) / n as f64;
    rep.check(Check::at_most("C(0) vs covariance", (corr[0].1 - var).abs(), 1e-12 * var.abs().max(1e-300)));
    // Fit on t = 0 and the grid points still above the noise.
    let fit: Vec<(f64, f64)> = corr
        .iter()
        .enumerate()
        .filter(|(i, (_, c, se))| *i == 0 || (c.abs() > 3.0 * se && *c != 0.0))
        .map(|(_, (t, c, _))| (*t, c.abs().ln()))
        .collect();
    let (gamma, gamma_se) = if fit.len() >= 2 {
        let (b, _, se) = fit_line(&fit.iter().map(|p| p.0).collect::<Vec<_>>(), &fit.iter().map(|p| p.1).collect::<Vec<_>>());
        (-b, se)
    } else {
        (f64::NAN, f64::NAN)
    };
    rep.stat("decay_rate", gamma);
    rep.stat("decay_rate_ci_half_width", 1.96 * gamma_se);
    rep.tables.push(table);
    let (_, c_last, se_last) = *corr.last().expect("t = 0 is always present");
    rep.check(Check::above("fitted decay rate", gamma, 0.0));
    rep.check(Check::at_most("|C(t_max)| / stderr", ratio_or_zero(c_last.abs(), se_last), 3.0));
    rep.plot = Some(Plot {
        title: "correlation decay".into(),
        x_label: "t".into(),
        y_label: "|C(t)|".into(),
        log_x: false,
        log_y: true,
        series: vec![
            Series { label: "|C(t)|".into(), points: corr.iter().map(|(t, c, _)| (*t, c.abs())).collect() },
            Series { label: "3 stderr".into(), points: corr.iter().map(|(t, _, se)| (*t, 3.0 * se)).collect() },
        ],
    });
    Ok(rep)
}

/// Frames `center·e^{aX-}e^{bZ}e^{cX+}` with `(a, b, c)` uniform in the ball of
/// radius `r`; the first `n` frames do not depend on the total count.
fn ball_sample(center: &GroupElement, r: f64, n: usize, seed: u64) -> Vec<GroupElement> {
    (0..n)
        .map(|k| {
            let mut rng = shard_rng(seed, STREAM_BALL + k as u64);
            loop {
                let x: [f64; 3] = [rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r)];
                if x.iter().map(|c| c * c).sum::<f64>() <= r * r {
                    let g = flow_unchecked(center, Generator::Unstable, x[0]);
                    let g = flow_unchecked(&g, Generator::Geodesic, x[1]);
                    return flow_unchecked(&g, Generator::Stable, x[2]);
                }
            }
        })
        .collect()
}

/// Largest distance from a test frame to the nearest cloud frame, with the
/// distance `min_γ |g⁻¹γh ∓ I|` over words of length at most two.
fn covering_radius(surface: &Surface, cloud: &[GroupElement], tests: &[GroupElement]) -> Result<f64> {
    let words: Vec<GroupElement> = surface.group.word_ball(2).into_iter().map(|w| w.1).collect();
    let mut lifted = Vec::with_capacity(cloud.len() * words.len());
    for g in cloud {
        let g0 = surface.domain.reduce_frame(g)?;
        for w in &words {
            lifted.push((*w * g0).entries());
        }
    }
    let dists = par::map_slice(tests, |t| {
        let [a, b, c, d] = t.inverse().entries();
        let mut best = f64::INFINITY;
        for h in &lifted {
            let m = [a * h[0] + b * h[2], a * h[1] + b * h[3], c * h[0] + d * h[2], c * h[1] + d * h[3]];
            let off = m[1] * m[1] + m[2] * m[2];
            let q = off + (m[0] - 1.0).powi(2) + (m[3] - 1.0).powi(2);
            let q2 = off + (m[0] + 1.0).powi(2) + (m[3] + 1.0).powi(2);
            best = best.min(q.min(q2));
        }
        best.sqrt()
    });
    Ok(dists.into_iter().fold(0.0, f64::max))
}

/// Covering radius of a flowed ball of radius 1/2 as a function of the flow
/// time.
pub fn density_probe(surface: &Surface, times: &[f64], n: usize, seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("density");
    rep.param("seed", seed);
    rep.param("n", n);
    rep.param("times", list(times));
    let ball = ball_sample(&GroupElement::IDENTITY, 0.5, 2 * n, seed);
    let tests = liouville_sample(surface, 512, seed.wrapping_add(STREAM_GRID))?;
    let mut table = float_table("covering", &["T", "covering_radius", "covering_radius_2n"]);
    let mut radii = Vec::new();
    let mut doubled: f64 = 0.0;
    for &t in times {
        let flowed: Vec<GroupElement> = ball.iter().map(|g| flow_unchecked(g, Generator::Geodesic, t)).collect();
        let r = covering_radius(surface, &flowed[..n], &tests)?;
        let r2 = covering_radius(surface, &flowed, &tests)?;
        doubled = doubled.max(r2 - r);
        radii.push(r);
        table.push(vec![t.into(), r.into(), r2.into()]);
    }
    rep.tables.push(table);
    let increase = radii.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    rep.check(Check::at_most("covering radius increase along T", increase, 0.0));
    rep.check(Check::at_most("doubling n increases covering radius by", doubled, 0.0));
    rep.plot = Some(Plot {
        title: "covering radius of the flowed ball".into(),
        x_label: "T".into(),
        y_label: "covering radius".into(),
        log_x: false,
        log_y: false,
        series: vec![Series { label: "n".into(), points: times.iter().copied().zip(radii.iter().copied()).collect() }],
    });
    Ok(rep)
}
