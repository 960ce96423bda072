use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use efce_cli::{load_game, run_single, sweep, ExperimentConfig, Settings};

/// Learn extensive-form correlated equilibria with uncoupled no-regret
/// dynamics and write CSV traces of the equilibrium gaps.
#[derive(Debug, Parser)]
#[command(name = "efce", version)]
struct Cli {
    /// Flat key=value file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let base = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    let config = ExperimentConfig::resolve(cli.settings.over(base))?;
    let game = load_game(&config.game, config.normalize_payoffs)?;
    match &config.tau_sweep {
        Some(taus) => {
            let report = sweep(&config, &game, taus)?;
            print!("{}", report.render());
            if report.best.is_none() {
                anyhow::bail!("no step size completed");
            }
        }
        None => {
            let summary = run_single(&config, &game).context("run failed")?;
            if config.output.is_some() {
                println!("final gap {} after {} iterations", summary.final_gap, summary.iterations);
            }
        }
    }
    Ok(())
}
