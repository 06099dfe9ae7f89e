//! Flat sectioned `key = value` configuration.
//!
//! Sections are `[surface]`, `[observable]`, `[bump]` (repeatable, one per
//! bump), `[quadrature]`, `[experiments]` and `[output]`. Lists are comma
//! separated; `#` starts a comment. Keys missing from `[quadrature]`,
//! `[experiments]` and `[output]` take the acceptance defaults.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::experiments::Settings;
use crate::fuchsian::{frame_at, support_base_radius, Bump, InvariantObservable, Surface};

pub const SURFACE_TOKEN: &str = "octagon-genus2";

/// The configuration used by the acceptance suite.
pub const DEFAULT_CONFIG: &str = include_str!("../config/default.cfg");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },

    #[error("unknown key `{key}` in section [{section}]")]
    UnknownKey { section: String, key: String },

    #[error("missing key `{key}` in section [{section}]")]
    Missing { section: &'static str, key: &'static str },

    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },

    #[error("observable: {0}")]
    Observable(#[from] crate::Error),
}

/// Bump given by its center frame `(x + iy, θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub amplitude: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub surface: String,
    pub base: f64,
    pub bumps: Vec<BumpSpec>,
    pub settings: Settings,
    pub out_dir: PathBuf,
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), reason: reason.into() }
}

fn float(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.parse().map_err(|_| invalid(key, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(invalid(key, "must be finite"));
    }
    Ok(x)
}

fn int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| invalid(key, format!("`{v}` is not a non-negative integer")))
}

fn floats(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    let out = v.split(',').map(|s| float(key, s.trim())).collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        return Err(invalid(key, "empty list"));
    }
    Ok(out)
}

fn ints(key: &str, v: &str) -> Result<Vec<u64>, ConfigError> {
    v.split(',').map(|s| int(key, s.trim())).collect()
}

#[derive(Default)]
struct PartialBump {
    x: Option<f64>,
    y: Option<f64>,
    theta: Option<f64>,
    amplitude: Option<f64>,
    radius: Option<f64>,
}

impl PartialBump {
    fn finish(self) -> Result<BumpSpec, ConfigError> {
        let get = |v: Option<f64>, key| v.ok_or(ConfigError::Missing { section: "bump", key });
        Ok(BumpSpec {
            x: get(self.x, "x")?,
            y: get(self.y, "y")?,
            theta: get(self.theta, "theta")?,
            amplitude: get(self.amplitude, "amplitude")?,
            radius: get(self.radius, "radius")?,
        })
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Parses and validates.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut surface = None;
        let mut base = None;
        let mut bumps: Vec<PartialBump> = Vec::new();
        let mut settings = Settings::default();
        let mut out_dir = PathBuf::from("out");
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or(ConfigError::Syntax { line: line_no, reason: "unterminated section header".into() })?;
                section = name.trim().to_string();
                match section.as_str() {
                    "bump" => bumps.push(PartialBump::default()),
                    "surface" | "observable" | "quadrature" | "experiments" | "output" => {}
                    other => return Err(ConfigError::Syntax { line: line_no, reason: format!("unknown section [{other}]") }),
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or(ConfigError::Syntax { line: line_no, reason: "expected `key = value`".into() })?;
            let unknown = || ConfigError::UnknownKey { section: section.clone(), key: key.to_string() };
            let s = &mut settings;
            match (section.as_str(), key) {
                ("surface", "name") => surface = Some(value.to_string()),
                ("observable", "base") => base = Some(float(key, value)?),
                ("bump", _) => {
                    let b = bumps.last_mut().expect("a [bump] header opened this section");
                    let slot = match key {
                        "x" => &mut b.x,
                        "y" => &mut b.y,
                        "theta" => &mut b.theta,
                        "amplitude" => &mut b.amplitude,
                        "radius" => &mut b.radius,
                        _ => return Err(unknown()),
                    };
                    *slot = Some(float(key, value)?);
                }
                ("quadrature", "tail_tol") => s.tail_tol = float(key, value)?,
                ("quadrature", "max_t") => s.max_t = float(key, value)?,
                ("quadrature", "mc_tail_tol") => s.mc_tail_tol = float(key, value)?,
                ("experiments", "seed") => s.seed = int(key, value)?,
                ("experiments", "seeds") => s.seeds = ints(key, value)?,
                ("experiments", "deltas") => s.deltas = floats(key, value)?,
                ("experiments", "mean_zero_deltas") => s.mean_zero_deltas = floats(key, value)?,
                ("experiments", "n") => s.n = int(key, value)?,
                ("experiments", "m") => s.m = int(key, value)?,
                ("experiments", "configs") => s.configs = int(key, value)?,
                ("experiments", "t_grid") => s.t_grid = floats(key, value)?,
                ("experiments", "drift_delta") => s.drift_delta = float(key, value)?,
                ("experiments", "drift_times") => s.drift_times = floats(key, value)?,
                ("experiments", "stokes_side") => s.stokes_side = float(key, value)?,
                ("experiments", "stokes_tiles") => s.stokes_tiles = floats(key, value)?,
                ("experiments", "density_times") => s.density_times = floats(key, value)?,
                ("experiments", "density_n") => s.density_n = int(key, value)?,
                ("output", "dir") => out_dir = PathBuf::from(value),
                ("", _) => return Err(ConfigError::Syntax { line: line_no, reason: "key outside of a section".into() }),
                _ => return Err(unknown()),
            }
        }
        let config = Config {
            surface: surface.ok_or(ConfigError::Missing { section: "surface", key: "name" })?,
            base: base.ok_or(ConfigError::Missing { section: "observable", key: "base" })?,
            bumps: bumps.into_iter().map(PartialBump::finish).collect::<Result<_, _>>()?,
            settings,
            out_dir,
        };
        config.validate()?;
        Ok(config)
    }

    /// Rejects a non-positive base, an amplitude budget that breaks
    /// positivity, bump supports reaching half the systole, and experiment
    /// parameters outside the ranges the sweeps accept.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.surface != SURFACE_TOKEN {
            return Err(invalid("name", format!("only `{SURFACE_TOKEN}` is supported")));
        }
        if !(self.base > 0.0) {
            return Err(invalid("base", "must be positive"));
        }
        let budget = self.base - self.bumps.iter().map(|b| b.amplitude.abs()).sum::<f64>();
        if !(budget > 0.0) {
            return Err(invalid("amplitude", format!("base minus total |amplitude| is {budget}, so the observable is not positive")));
        }
        let systole = Surface::octagon()?.group.systole;
        for b in &self.bumps {
            if !(b.y > 0.0) {
                return Err(invalid("y", "bump center must lie in the upper half-plane"));
            }
            if !(b.radius > 0.0) || support_base_radius(b.radius) >= 0.5 * systole {
                return Err(invalid("radius", format!("support of radius {} must stay below half the systole {:.6}", b.radius, 0.5 * systole)));
            }
        }
        let s = &self.settings;
        for (key, v) in [("tail_tol", s.tail_tol), ("mc_tail_tol", s.mc_tail_tol), ("max_t", s.max_t)] {
            if !(v > 0.0) {
                return Err(invalid(key, "must be positive"));
            }
        }
        if s.deltas.len() < 3 || s.deltas.iter().any(|d| !(*d > 0.0 && *d <= 0.1)) {
            return Err(invalid("deltas", "need at least three values in (0, 0.1]"));
        }
        if s.mean_zero_deltas.iter().chain([&s.drift_delta]).any(|d| !(*d > 0.0 && *d <= 0.5)) {
            return Err(invalid("mean_zero_deltas", "values must lie in (0, 0.5]"));
        }
        if s.n < 1000 {
            return Err(invalid("n", "at least 1000 samples"));
        }
        if s.m == 0 || s.configs == 0 || s.density_n == 0 {
            return Err(invalid("m", "sample counts must be positive"));
        }
        if s.t_grid.iter().chain(&s.density_times).any(|t| *t < 0.0) {
            return Err(invalid("t_grid", "times must be non-negative"));
        }
        if !(s.stokes_side > 0.0) || s.stokes_tiles.len() < 3 {
            return Err(invalid("stokes_tiles", "need a positive side and at least three tile sizes"));
        }
        for &dt in &s.stokes_tiles {
            let k = (s.stokes_side / dt).round();
            if !(dt > 0.0) || k < 1.0 || (k * dt - s.stokes_side).abs() > 1e-9 * s.stokes_side {
                return Err(invalid("stokes_tiles", format!("{dt} does not divide the side {}", s.stokes_side)));
            }
        }
        Ok(())
    }

    pub fn surface(&self) -> Result<Arc<Surface>, ConfigError> {
        Ok(Surface::octagon()?)
    }

    pub fn bumps(&self) -> Vec<Bump> {
        self.bumps.iter().map(|b| Bump { center: frame_at(b.x, b.y, b.theta), amplitude: b.amplitude, radius: b.radius }).collect()
    }

    /// The configured time change.
    pub fn observable(&self, surface: &Arc<Surface>) -> Result<InvariantObservable, ConfigError> {
        Ok(InvariantObservable::new(surface.clone(), self.base, self.bumps())?)
    }

    /// The bump part of the observable, as a mean-nonzero test function.
    pub fn test_function(&self, surface: &Arc<Surface>) -> Result<InvariantObservable, ConfigError> {
        Ok(InvariantObservable::test_function(surface.clone(), 0.0, self.bumps())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with(replace: &str, by: &str) -> Result<Config, ConfigError> {
        assert!(DEFAULT_CONFIG.contains(replace));
        Config::parse(&DEFAULT_CONFIG.replacen(replace, by, 1))
    }

    #[test]
    fn default_config_gives_acceptance_settings() {
        let c = Config::parse(DEFAULT_CONFIG).unwrap();
        assert_eq!(c.settings, Settings::default());
        assert_eq!(c.bumps.len(), 2);
        assert_eq!(c.bumps[0].amplitude, 0.1);
        assert_eq!(c.out_dir, PathBuf::from("out"));
    }

    #[test]
    fn rejects_non_positive_base() {
        assert!(matches!(with("base = 1.0", "base = 0"), Err(ConfigError::Invalid { .. })));
        assert!(matches!(with("base = 1.0", "base = -1"), Err(ConfigError::Invalid { .. })));
    }

    #[test]
    fn rejects_amplitude_budget() {
        assert!(matches!(with("amplitude = 0.1", "amplitude = 0.96"), Err(ConfigError::Invalid { .. })));
        assert!(with("amplitude = 0.1", "amplitude = 0.94").is_ok());
    }

    #[test]
    fn rejects_radius_reaching_half_systole() {
        let err = with("radius = 0.5", "radius = 1.6").unwrap_err();
        assert!(err.to_string().contains("systole"), "{err}");
    }

    #[test]
    fn rejects_unknown_keys_sections_and_surfaces() {
        assert!(matches!(with("n = 100000", "samples = 100000"), Err(ConfigError::UnknownKey { .. })));
        assert!(matches!(with("[output]", "[outputs]"), Err(ConfigError::Syntax { .. })));
        assert!(matches!(with("name = octagon-genus2", "name = torus"), Err(ConfigError::Invalid { .. })));
        assert!(matches!(with("y = 1.2", ""), Err(ConfigError::Missing { section: "bump", key: "y" })));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(with("deltas = 0.08, 0.04, 0.02", "deltas = 0.2, 0.04, 0.02").is_err());
        assert!(with("stokes_tiles = 0.04, 0.02, 0.01", "stokes_tiles = 0.03, 0.02, 0.01").is_err());
        assert!(with("n = 100000", "n = 10").is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(Config::load(Path::new("/nonexistent/lab.cfg")), Err(ConfigError::Io { .. })));
    }
}
