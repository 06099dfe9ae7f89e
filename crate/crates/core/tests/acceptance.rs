//! Acceptance criteria at the default configuration. Criteria run one after
//! another so that their runtimes are measured without contention; each
//! prints a single PASS/FAIL line and the test fails if any criterion does.

use std::time::{Duration, Instant};

use reparam_lab::config::{Config, DEFAULT_CONFIG};
use reparam_lab::experiments::{self, Check, ExperimentReport, Settings};
use reparam_lab::fuchsian::InvariantObservable;

struct Criterion {
    id: usize,
    title: &'static str,
    budget: Duration,
}

fn pick<'a>(rep: &'a ExperimentReport, names: &[&str]) -> Vec<&'a Check> {
    names.iter().map(|n| rep.find(n).unwrap_or_else(|| panic!("{} has no check `{n}`", rep.name))).collect()
}

fn verdict(c: &Criterion, checks: &[&Check], elapsed: Duration) -> (bool, String) {
    let in_time = elapsed <= c.budget;
    let passed = in_time && checks.iter().all(|k| k.passed);
    let detail: Vec<String> = checks
        .iter()
        .map(|k| format!("{} {:.3e} {} {:.1e}{}", k.name, k.value, k.relation, k.threshold, if k.passed { "" } else { " (fail)" }))
        .collect();
    let line = format!(
        "{} criterion {:>2} {}: {}; runtime {:.1} s (budget {} s{})",
        if passed { "PASS" } else { "FAIL" },
        c.id,
        c.title,
        detail.join("; "),
        elapsed.as_secs_f64(),
        c.budget.as_secs(),
        if in_time { "" } else { ", exceeded" }
    );
    (passed, line)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

#[test]
fn acceptance() {
    let config = Config::parse(DEFAULT_CONFIG).expect("default config is valid");
    let s: Settings = config.settings.clone();
    let surface = config.surface().unwrap();
    let psi = config.observable(&surface).unwrap();
    let secs = Duration::from_secs;
    let mut lines = Vec::new();
    let mut all = true;
    let mut record = |c: Criterion, rep: reparam_lab::Result<ExperimentReport>, names: &[&str], elapsed: Duration| {
        let (passed, line) = match rep {
            Ok(rep) => verdict(&c, &pick(&rep, names), elapsed),
            Err(e) => (false, format!("FAIL criterion {:>2} {}: error: {e}", c.id, c.title)),
        };
        println!("{line}");
        all &= passed;
        lines.push(line);
    };

    let (rep, t) = timed(|| experiments::verify_quadrilateral(&surface, &s));
    record(
        Criterion { id: 1, title: "quadrilateral closure", budget: secs(1) },
        rep,
        &["closed-form sides", "holonomy gap", "approximate quintuple gap / 2 delta^3"],
        t,
    );

    // Criteria 2 and 3 come from one suite; both are held to its total runtime.
    let (rep, t) = timed(|| experiments::verify_cross_ratio(&psi, &s));
    let rep2 = rep.clone();
    record(
        Criterion { id: 2, title: "cross-ratio spectrum identity", budget: secs(1) },
        rep,
        &["spectrum identity", "worked value [0,inf,e,1] - 2"],
        t,
    );
    record(
        Criterion { id: 3, title: "dynamical cross ratio", budget: secs(30) },
        rep2,
        &["geodesic circuit vs cross ratio", "time-changed circuit vs cross ratio"],
        t,
    );

    let (rep, t) = timed(|| experiments::constant_degeneration(&surface, 1.7, &s));
    record(Criterion { id: 4, title: "constant observable degeneration", budget: secs(60) }, rep, &["constant observable sweep"], t);

    let (rep, t) = timed(|| experiments::two_route(&psi, &s));
    record(Criterion { id: 5, title: "two-route h_delta", budget: secs(300) }, rep, &["integral vs cross-ratio route"], t);

    let (rep, t) = timed(|| experiments::verify_main_theorem(&psi, &s));
    record(
        Criterion { id: 6, title: "main theorem", budget: secs(900) },
        rep,
        &["fitted order of max deviation", "deviation increase beyond 3 stderr"],
        t,
    );

    let (rep, t) = timed(|| experiments::mean_zero_check(&psi, &s));
    record(
        Criterion { id: 7, title: "mean zero of tau_delta", budget: secs(600) },
        rep,
        &["|mean tau| / stderr at delta=0.1", "|mean tau| / stderr at delta=0.05"],
        t,
    );

    let (rep, t) = timed(|| experiments::drift_bounds(&psi, &s));
    record(
        Criterion { id: 8, title: "truncation and drift bounds", budget: secs(300) },
        rep,
        &["truncation gap / 4|psi|_C1 delta^3", "tau drift / bound", "h_delta drift / bound"],
        t,
    );

    let (rep, t) = timed(|| experiments::stokes_check(&psi, &s));
    record(
        Criterion { id: 9, title: "tiled Stokes identity", budget: secs(600) },
        rep,
        &["residual order in delta_tile", "flow-tangent circulation", "reeb defect at delta=0.02"],
        t,
    );

    let (rep, t) = timed(|| experiments::cb_check(&psi, &s));
    record(
        Criterion { id: 10, title: "CB machinery", budget: secs(120) },
        rep,
        &[
            "cb(alpha+, alpha)",
            "cb(alpha+, alpha_psi) + h-",
            "affine volume identity vs finite differences",
            "min reeb pairing of alpha_psi",
            "reeb pairings equal psi, 0 and 1",
        ],
        t,
    );

    let phi: InvariantObservable = config.test_function(&surface).unwrap();
    let (rep, t) = timed(|| experiments::mixing_probe(&psi, &phi, &phi, &s.t_grid, s.n, s.seed));
    record(Criterion { id: 11, title: "mixing probe", budget: secs(600) }, rep, &["fitted decay rate", "|C(t_max)| / stderr"], t);

    println!("\nsummary:");
    for l in &lines {
        println!("{l}");
    }
    assert!(all, "acceptance criteria failed:\n{}", lines.iter().filter(|l| l.starts_with("FAIL")).cloned().collect::<Vec<_>>().join("\n"));
}
