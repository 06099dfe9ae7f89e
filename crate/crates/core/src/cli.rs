//! Command-line entry point: runs a suite, prints one PASS/FAIL line per
//! check and writes `<out>/<command>.csv` (and `.svg` when plots are on).
//!
//! Exit codes: 0 when every check passes, 1 when any check fails or a suite
//! stops on a numerical error, 2 for usage and configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{CommandFactory, Parser, ValueEnum};

use crate::config::{Config, ConfigError};
use crate::experiments::{self, ExperimentReport};
use crate::fuchsian::InvariantObservable;
use crate::report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    VerifyQuadrilateral,
    VerifyCrossRatio,
    VerifyBusemann,
    VerifyParry,
    VerifyMainTheorem,
    MeanZero,
    Stokes,
    CbCheck,
    Mixing,
    Density,
    All,
}

impl Command {
    pub const SUITES: [Command; 10] = [
        Command::VerifyQuadrilateral,
        Command::VerifyCrossRatio,
        Command::VerifyBusemann,
        Command::VerifyParry,
        Command::VerifyMainTheorem,
        Command::MeanZero,
        Command::Stokes,
        Command::CbCheck,
        Command::Mixing,
        Command::Density,
    ];

    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

#[derive(Debug, Parser)]
#[command(name = "reparam-lab", version, about = "Numerical checks for time changes of the geodesic flow on the genus-2 octagon surface")]
pub struct Args {
    pub command: Command,
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output directory; overrides `[output] dir`.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Quadrature tail tolerance; overrides `[quadrature] tail_tol`.
    #[arg(long, value_name = "FLOAT")]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "on")]
    pub plots: Toggle,
}

/// Runs one suite.
pub fn run_suite(command: Command, config: &Config) -> Result<Vec<ExperimentReport>, RunError> {
    let s = &config.settings;
    let surface = config.surface()?;
    let psi = config.observable(&surface)?;
    let reports = match command {
        Command::VerifyQuadrilateral => vec![experiments::verify_quadrilateral(&surface, s)?],
        Command::VerifyCrossRatio => vec![experiments::verify_cross_ratio(&psi, s)?],
        Command::VerifyBusemann => vec![experiments::verify_busemann(&psi, s)?],
        Command::VerifyParry => vec![experiments::verify_parry(&psi, s)?],
        Command::VerifyMainTheorem => vec![experiments::verify_main_theorem(&psi, s)?],
        Command::MeanZero => vec![experiments::mean_zero_check(&psi, s)?],
        Command::Stokes => vec![experiments::stokes_check(&psi, s)?],
        Command::CbCheck => vec![experiments::cb_check(&psi, s)?],
        Command::Mixing => {
            let phi = config.test_function(&surface)?;
            let mut time_changed = experiments::mixing_probe(&psi, &phi, &phi, &s.t_grid, s.n, s.seed)?;
            time_changed.name = "mixing".into();
            let unit = InvariantObservable::constant(surface.clone(), 1.0)?;
            let mut geodesic = experiments::mixing_probe(&unit, &phi, &phi, &s.t_grid, s.n, s.seed)?;
            geodesic.name = "mixing-geodesic".into();
            vec![time_changed, geodesic]
        }
        Command::Density => vec![experiments::density_probe(&surface, &s.density_times, s.density_n, s.seed)?],
        Command::All => {
            let mut all = Vec::new();
            for c in Command::SUITES {
                all.extend(run_suite(c, config)?);
            }
            all
        }
    };
    Ok(reports)
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical error: {0}")]
    Numerical(#[from] crate::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if e.use_stderr() {
                let _ = write!(err, "{}\n{}\n", e.render(), Args::command().render_usage());
            } else {
                let _ = write!(out, "{}", e.render());
            }
            return code;
        }
    };
    let mut config = match Config::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "config error: {e}");
            return 2;
        }
    };
    if let Some(seed) = args.seed {
        config.settings.seed = seed;
    }
    if let Some(tol) = args.tol {
        config.settings.tail_tol = tol;
    }
    if let Some(dir) = args.out {
        config.out_dir = dir;
    }
    if let Err(e) = config.validate() {
        let _ = writeln!(err, "config error: {e}");
        return 2;
    }
    let start = Instant::now();
    let result = run_suite(args.command, &config).and_then(|reports| {
        write_artifacts(args.command, &config, &reports, args.plots == Toggle::On)?;
        Ok(reports)
    });
    match result {
        Ok(reports) => {
            let mut passed = true;
            for rep in &reports {
                for c in &rep.checks {
                    let _ = writeln!(out, "{}", c.line(&rep.name));
                    passed &= c.passed;
                }
            }
            let _ = writeln!(err, "{} finished in {:.1} s", args.command.name(), start.elapsed().as_secs_f64());
            if passed {
                0
            } else {
                1
            }
        }
        Err(RunError::Config(e)) => {
            let _ = writeln!(err, "config error: {e}");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn write_artifacts(command: Command, config: &Config, reports: &[ExperimentReport], plots: bool) -> Result<(), RunError> {
    let dir = &config.out_dir;
    let io = |path: PathBuf| move |source| RunError::Output { path, source };
    std::fs::create_dir_all(dir).map_err(io(dir.clone()))?;
    let name = command.name();
    let csv = dir.join(format!("{name}.csv"));
    std::fs::write(&csv, report::to_csv(reports)).map_err(io(csv.clone()))?;
    if plots {
        let figures: Vec<_> = reports.iter().filter_map(|r| r.plot.as_ref()).collect();
        if let Some(svg) = report::stack_svg(&figures) {
            let path = dir.join(format!("{name}.svg"));
            std::fs::write(&path, svg).map_err(io(path.clone()))?;
        }
    }
    Ok(())
}

/// Entry point for the binary.
pub fn main_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
