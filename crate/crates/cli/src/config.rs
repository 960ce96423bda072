//! Experiment configuration: a flat `key=value` file merged under
//! command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use efce_core::benchmarks::Benchmark;
use efce_core::equilibrium::{Algorithm, Subsolver, Target, TAU_GRID};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {message}")]
    File { path: String, line: usize, message: String },
    #[error("`{field}`: {message}")]
    Field { field: &'static str, message: String },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn field_err(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field, message: message.into() }
}

/// A benchmark by name or a game file in the text format.
#[derive(Debug, Clone, PartialEq)]
pub enum GameSource {
    Benchmark(Benchmark),
    File(PathBuf),
}

impl GameSource {
    /// Short label for CSV rows.
    pub fn label(&self) -> String {
        match self {
            GameSource::Benchmark(b) => b.name().to_string(),
            GameSource::File(p) => p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned()),
        }
    }
}

impl FromStr for GameSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.strip_prefix("file:") {
            Some(path) if !path.is_empty() => Ok(GameSource::File(PathBuf::from(path))),
            Some(_) => Err("empty path after `file:`".into()),
            None => s.parse::<Benchmark>().map(GameSource::Benchmark).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    /// Milliseconds since the start of the run.
    Wall,
    /// Always 0, so repeated runs produce identical files.
    Off,
}

impl FromStr for Timing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "wall" => Ok(Timing::Wall),
            "off" => Ok(Timing::Off),
            _ => Err(format!("unknown timing `{s}` (expected wall or off)")),
        }
    }
}

/// Every setting is optional here; [`ExperimentConfig::resolve`] applies
/// defaults. Field names double as config-file keys with `-` for `_`.
#[derive(Debug, Clone, Default, Args)]
pub struct Settings {
    /// kuhn3, sheriff, goofspiel3, liars_dice3 or file:<path>
    #[arg(long)]
    pub game: Option<String>,
    /// omwu, mwu or rmplus
    #[arg(long)]
    pub algorithm: Option<String>,
    /// efce or efcce
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Comma-separated step scales, or `grid` for 0.01,0.1,1,10,100
    #[arg(long)]
    pub tau_sweep: Option<String>,
    /// Exponent in eta_t = tau * t^(-exponent); defaults per algorithm
    #[arg(long)]
    pub eta_exponent: Option<f64>,
    /// Recorded for provenance; the dynamics are deterministic
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub fp_tol: Option<f64>,
    #[arg(long)]
    pub fp_max_iter: Option<usize>,
    #[arg(long)]
    pub log_every: Option<usize>,
    /// CSV path; `-` or absent writes to stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub normalize_payoffs: Option<bool>,
    /// cfr or dge
    #[arg(long)]
    pub subsolver: Option<String>,
    /// wall or off
    #[arg(long)]
    pub timing: Option<String>,
}

impl Settings {
    /// Parses a config file. Unknown keys and malformed values are errors.
    pub fn from_file(path: &Path) -> Result<Settings, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Settings::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Settings, ConfigError> {
        let mut s = Settings::default();
        for (k, line) in text.lines().enumerate() {
            let err = |message: String| ConfigError::File { path: origin.to_string(), line: k + 1, message };
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key=value, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim().to_string());
            fn num<T: FromStr>(key: &str, v: &str) -> Result<T, String>
            where
                T::Err: std::fmt::Display,
            {
                v.parse::<T>().map_err(|e| format!("bad value `{v}` for `{key}`: {e}"))
            }
            match key {
                "game" => s.game = Some(value),
                "algorithm" => s.algorithm = Some(value),
                "target" => s.target = Some(value),
                "iterations" => s.iterations = Some(num(key, &value).map_err(err)?),
                "tau" => s.tau = Some(num(key, &value).map_err(err)?),
                "tau-sweep" => s.tau_sweep = Some(value),
                "eta-exponent" => s.eta_exponent = Some(num(key, &value).map_err(err)?),
                "seed" => s.seed = Some(num(key, &value).map_err(err)?),
                "fp-tol" => s.fp_tol = Some(num(key, &value).map_err(err)?),
                "fp-max-iter" => s.fp_max_iter = Some(num(key, &value).map_err(err)?),
                "log-every" => s.log_every = Some(num(key, &value).map_err(err)?),
                "output" => s.output = Some(PathBuf::from(value)),
                "normalize-payoffs" => s.normalize_payoffs = Some(num(key, &value).map_err(err)?),
                "subsolver" => s.subsolver = Some(value),
                "timing" => s.timing = Some(value),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        Ok(s)
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            game: self.game.or(base.game),
            algorithm: self.algorithm.or(base.algorithm),
            target: self.target.or(base.target),
            iterations: self.iterations.or(base.iterations),
            tau: self.tau.or(base.tau),
            tau_sweep: self.tau_sweep.or(base.tau_sweep),
            eta_exponent: self.eta_exponent.or(base.eta_exponent),
            seed: self.seed.or(base.seed),
            fp_tol: self.fp_tol.or(base.fp_tol),
            fp_max_iter: self.fp_max_iter.or(base.fp_max_iter),
            log_every: self.log_every.or(base.log_every),
            output: self.output.or(base.output),
            normalize_payoffs: self.normalize_payoffs.or(base.normalize_payoffs),
            subsolver: self.subsolver.or(base.subsolver),
            timing: self.timing.or(base.timing),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub game: GameSource,
    pub algorithm: Algorithm,
    pub target: Target,
    pub subsolver: Subsolver,
    pub iterations: usize,
    pub tau: f64,
    pub tau_sweep: Option<Vec<f64>>,
    pub eta_exponent: f64,
    pub seed: u64,
    pub fp_tol: f64,
    pub fp_max_iter: usize,
    pub log_every: usize,
    pub output: Option<PathBuf>,
    pub normalize_payoffs: bool,
    pub timing: Timing,
}

fn positive(field: &'static str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(field_err(field, format!("must be positive, got {v}")))
    }
}

fn parse_taus(s: &str) -> Result<Vec<f64>, ConfigError> {
    if s.trim() == "grid" {
        return Ok(TAU_GRID.to_vec());
    }
    let taus = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| field_err("tau-sweep", format!("bad value `{t}`: {e}"))))
        .collect::<Result<Vec<f64>, _>>()?;
    if taus.is_empty() {
        return Err(field_err("tau-sweep", "empty list"));
    }
    taus.into_iter().map(|t| positive("tau-sweep", t)).collect()
}

impl ExperimentConfig {
    pub fn resolve(s: Settings) -> Result<ExperimentConfig, ConfigError> {
        let game = s.game.ok_or_else(|| field_err("game", "required"))?.parse::<GameSource>().map_err(|e| field_err("game", e))?;
        let algorithm = match s.algorithm {
            Some(a) => a.parse::<Algorithm>().map_err(|e| field_err("algorithm", e.to_string()))?,
            None => Algorithm::Omwu,
        };
        let target = match s.target {
            Some(t) => t.parse::<Target>().map_err(|e| field_err("target", e.to_string()))?,
            None => Target::Efce,
        };
        let subsolver = match s.subsolver {
            Some(v) => v.parse::<Subsolver>().map_err(|e| field_err("subsolver", e.to_string()))?,
            None => Subsolver::Cfr,
        };
        let iterations = s.iterations.unwrap_or(1000);
        if iterations == 0 {
            return Err(field_err("iterations", "must be positive"));
        }
        let log_every = s.log_every.unwrap_or(10);
        if log_every == 0 {
            return Err(field_err("log-every", "must be positive"));
        }
        let fp_max_iter = s.fp_max_iter.unwrap_or(100_000);
        if fp_max_iter == 0 {
            return Err(field_err("fp-max-iter", "must be positive"));
        }
        let eta_exponent = s.eta_exponent.unwrap_or_else(|| algorithm.default_exponent());
        if !(eta_exponent.is_finite() && eta_exponent >= 0.0) {
            return Err(field_err("eta-exponent", format!("must be nonnegative, got {eta_exponent}")));
        }
        Ok(ExperimentConfig {
            game,
            algorithm,
            target,
            subsolver,
            iterations,
            tau: positive("tau", s.tau.unwrap_or(1.0))?,
            tau_sweep: s.tau_sweep.as_deref().map(parse_taus).transpose()?,
            eta_exponent,
            seed: s.seed.unwrap_or(0),
            fp_tol: positive("fp-tol", s.fp_tol.unwrap_or(1e-6))?,
            fp_max_iter,
            log_every,
            output: s.output.filter(|p| p.as_os_str() != "-"),
            normalize_payoffs: s.normalize_payoffs.unwrap_or(true),
            timing: s.timing.as_deref().unwrap_or("wall").parse::<Timing>().map_err(|e| field_err("timing", e))?,
        })
    }
}
