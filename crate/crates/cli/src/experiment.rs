use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use efce_core::deviations::DeviationKind;
use efce_core::equilibrium::{Learner, LearnerConfig, LearnerError};
use efce_core::game::{parse_game, Game, ParseError};
use efce_core::regret::StepSize;
use thiserror::Error;

use crate::config::{ExperimentConfig, GameSource, Timing};

pub const CSV_HEADER: [&str; 12] = [
    "iter", "game", "algorithm", "target", "tau", "player", "raw_gap", "gap_efce", "gap_efcce", "psi_regret", "fp_residual", "ms_elapsed",
];

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot read game file {path}: {source}")]
    ReadGame { path: String, source: io::Error },
    #[error("game file {path}: {source}")]
    Game { path: String, source: ParseError },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Learner(#[from] LearnerError),
}

pub fn load_game(source: &GameSource, normalize: bool) -> Result<Game, RunError> {
    match source {
        GameSource::Benchmark(b) => Ok(b.build()),
        GameSource::File(path) => {
            let shown = path.display().to_string();
            let text = std::fs::read_to_string(path).map_err(|source| RunError::ReadGame { path: shown.clone(), source })?;
            parse_game(&text, normalize).map_err(|source| RunError::Game { path: shown, source })
        }
    }
}

/// Final state of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub iterations: usize,
    /// Clamped gap for the configured target.
    pub final_gap: f64,
    pub final_efce: f64,
    pub final_efcce: f64,
    /// Largest Φ-regret over players.
    pub psi_regret: f64,
    pub logged: usize,
}

pub fn learner_config(config: &ExperimentConfig, tau: f64) -> LearnerConfig {
    let mut lc = LearnerConfig::new(config.target, config.algorithm, tau);
    lc.subsolver = config.subsolver;
    lc.step = StepSize::Decaying { tau, exponent: config.eta_exponent };
    lc.fixed_point.tol = config.fp_tol;
    lc.fixed_point.max_iter = config.fp_max_iter;
    lc
}

/// Runs the dynamics with step scale `tau`, writing one CSV row per player
/// and one aggregate row (player -1) at every logged iteration.
pub fn run_experiment<W: Write>(config: &ExperimentConfig, game: &Game, tau: f64, out: W) -> Result<RunSummary, RunError> {
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(CSV_HEADER)?;
    let label = config.game.label();
    let (algorithm, target, tau_s) = (config.algorithm.to_string(), config.target.to_string(), tau.to_string());
    let mut learner = Learner::new(game, learner_config(config, tau))?;
    let start = Instant::now();
    let mut logged = 0;
    let kind = config.target.kind();
    let n = game.num_players();
    for t in 1..=config.iterations {
        let stepped = learner.step();
        if let Err(e) = stepped {
            csv.flush().ok();
            return Err(e.into());
        }
        if t % config.log_every != 0 && t != config.iterations {
            continue;
        }
        let efce = learner.gap(DeviationKind::Trigger).expect("t >= 1");
        let efcce = learner.gap(DeviationKind::Coarse).expect("t >= 1");
        let raw = if kind == DeviationKind::Trigger { &efce.raw } else { &efcce.raw };
        let ms = match config.timing {
            Timing::Wall => start.elapsed().as_secs_f64() * 1e3,
            Timing::Off => 0.0,
        };
        let regrets: Vec<f64> = (0..n).map(|p| learner.phi_regret(p)).collect();
        let iter = t.to_string();
        let mut row = |player: String, raw: f64, e: f64, c: f64, reg: f64, res: f64| {
            csv.write_record([
                iter.as_str(),
                &label,
                &algorithm,
                &target,
                &tau_s,
                &player,
                &raw.to_string(),
                &e.to_string(),
                &c.to_string(),
                &reg.to_string(),
                &res.to_string(),
                &ms.to_string(),
            ])
        };
        for p in 0..n {
            row(p.to_string(), raw[p], efce.raw[p].max(0.0), efcce.raw[p].max(0.0), regrets[p], learner.residuals()[p])?;
        }
        let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row("-1".into(), max(raw), efce.gap, efcce.gap, max(&regrets), max(learner.residuals()))?;
        logged += 1;
    }
    csv.flush().map_err(|source| RunError::Write { path: "output".into(), source })?;
    let efce = learner.gap(DeviationKind::Trigger).expect("t >= 1");
    let efcce = learner.gap(DeviationKind::Coarse).expect("t >= 1");
    Ok(RunSummary {
        iterations: config.iterations,
        final_gap: if kind == DeviationKind::Trigger { efce.gap } else { efcce.gap },
        final_efce: efce.gap,
        final_efcce: efcce.gap,
        psi_regret: (0..n).map(|p| learner.phi_regret(p)).fold(f64::NEG_INFINITY, f64::max),
        logged,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    File::create(path).map(BufWriter::new).map_err(|source| RunError::Write { path: path.display().to_string(), source })
}

/// Runs a single configuration to the configured output, or stdout.
pub fn run_single(config: &ExperimentConfig, game: &Game) -> Result<RunSummary, RunError> {
    match &config.output {
        Some(path) => run_experiment(config, game, config.tau, create(path)?),
        None => run_experiment(config, game, config.tau, io::stdout().lock()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub tau: f64,
    pub output: Option<PathBuf>,
    /// Summary, or the error that stopped the run.
    pub result: Result<RunSummary, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// One entry per step scale, in increasing order.
    pub entries: Vec<SweepEntry>,
    /// Index of the entry with the smallest final gap; ties go to the
    /// smaller step scale. `None` when every run failed.
    pub best: Option<usize>,
}

impl SweepReport {
    pub fn best_entry(&self) -> Option<&SweepEntry> {
        self.best.map(|k| &self.entries[k])
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            match &e.result {
                Ok(s) => out += &format!("tau={} final_gap={} psi_regret={}\n", e.tau, s.final_gap, s.psi_regret),
                Err(msg) => out += &format!("tau={} failed: {msg}\n", e.tau),
            }
        }
        match self.best_entry() {
            Some(e) => out += &format!("best tau={} final_gap={}\n", e.tau, e.result.as_ref().unwrap().final_gap),
            None => out += "best tau=none (every run failed)\n",
        }
        out
    }
}

/// `out.csv` becomes `out_tau0.1.csv`.
pub fn sweep_path(base: &Path, tau: f64) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_tau{tau}.{}", ext.to_string_lossy()),
        None => format!("{stem}_tau{tau}"),
    };
    base.with_file_name(name)
}

/// Runs every step scale in `taus`. A run that fails (for instance a fixed
/// point that does not converge at an extreme step size) is recorded and
/// excluded from the choice of the best scale.
pub fn sweep(config: &ExperimentConfig, game: &Game, taus: &[f64]) -> Result<SweepReport, RunError> {
    let mut taus = taus.to_vec();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let mut entries = Vec::with_capacity(taus.len());
    for tau in taus {
        let output = config.output.as_deref().map(|base| sweep_path(base, tau));
        let result = match &output {
            Some(path) => run_experiment(config, game, tau, create(path)?),
            None => run_experiment(config, game, tau, io::sink()),
        };
        let result = match result {
            Ok(summary) => Ok(summary),
            Err(RunError::Learner(e)) => Err(e.to_string()),
            Err(e) => return Err(e),
        };
        entries.push(SweepEntry { tau, output, result });
    }
    let mut best: Option<usize> = None;
    for (k, e) in entries.iter().enumerate() {
        if let Ok(s) = &e.result {
            if best.map_or(true, |b| s.final_gap < entries[b].result.as_ref().unwrap().final_gap) {
                best = Some(k);
            }
        }
    }
    Ok(SweepReport { entries, best })
}
