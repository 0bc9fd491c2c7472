//! `bench`: run constrained-regression benchmarks and render their reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ptrans_core::experiment::{
    default_lambda_grid, emit_outputs, frontier, frontier_svg, generate_scenario, read_metrics, run_benchmark,
    summarize, ExperimentConfig, ScenarioKind, SummaryRow,
};
use ptrans_core::rng::stream;
use ptrans_core::Error;

/// Share of failed seeds above which `run` exits with status 2.
const MAX_FAILED_FRACTION: f64 = 0.2;

#[derive(Parser)]
#[command(name = "bench", version, about = "Benchmarks for probabilistic transformers with exact constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and score the three models on every configured seed.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate one scenario and dump it as JSON.
    Scenario {
        #[arg(long)]
        kind: ScenarioKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dump: PathBuf,
        /// Defaults to the scenario's benchmark setting.
        #[arg(long)]
        train_size: Option<usize>,
        #[arg(long)]
        test_size: Option<usize>,
    },
    /// Redraw the combined-score frontier from a metrics table.
    Frontier {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
    Seeds(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn print_summary(rows: &[SummaryRow]) {
    println!(
        "{:<10} {:<14} {:>5} {:>12} {:>12} {:>12} {:>10}",
        "scenario", "model", "runs", "mse", "d_k", "mse/mlp", "failed"
    );
    for r in rows {
        println!(
            "{:<10} {:<14} {:>5} {:>12.4e} {:>12.4e} {:>12.4} {:>10}",
            r.scenario, r.model, r.runs, r.mse_mean, r.d_k_mean, r.mse_ratio_mean, r.failed
        );
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir = out
                .or_else(|| cfg.output_dir.clone())
                .ok_or_else(|| Failure::Config("no output directory: pass --out or set output_dir".into()))?;
            let outcome = run_benchmark(&cfg)?;
            emit_outputs(&outcome.rows, outcome.scatter.as_ref(), &cfg.lambda_grid, &dir)?;
            print_summary(&summarize(&outcome.rows));
            println!("wrote {}", dir.display());
            if outcome.failed_fraction() > MAX_FAILED_FRACTION {
                return Err(Failure::Seeds(format!("{} of {} seeds failed", outcome.failed_seeds, cfg.seeds.len())));
            }
            Ok(())
        }
        Command::Scenario { kind, seed, dump, train_size, test_size } => {
            let mut size = ExperimentConfig::default_for(kind).size();
            size.train = train_size.unwrap_or(size.train);
            size.test = test_size.unwrap_or(size.test);
            let scenario = generate_scenario(kind, &mut stream(seed, kind.name()), size)?;
            let json = serde_json::to_string(&scenario).map_err(|e| Failure::Runtime(e.to_string()))?;
            std::fs::write(&dump, json).map_err(|e| Failure::Runtime(format!("{}: {e}", dump.display())))?;
            println!("wrote {} ({} train, {} test)", dump.display(), scenario.train.len(), scenario.test.len());
            Ok(())
        }
        Command::Frontier { metrics, out } => {
            let rows = read_metrics(&metrics).map_err(|e| Failure::Config(format!("{}: {e}", metrics.display())))?;
            if rows.is_empty() {
                return Err(Failure::Config(format!("{} has no rows", metrics.display())));
            }
            let points = frontier(&summarize(&rows), &default_lambda_grid())?;
            std::fs::write(&out, frontier_svg(&points))
                .map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Seeds(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
