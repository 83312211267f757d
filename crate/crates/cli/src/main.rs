use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use delayed_bandit::harness::{self, ExperimentConfig};
use delayed_bandit::Error;

#[derive(Parser)]
#[command(
    name = "delayed-bandit",
    version,
    about = "Neural contextual bandits with delayed rewards"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed of an experiment and write CSV/JSON results.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated seeds overriding the config.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Output directory (defaults to the config's `output`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write into a non-empty output directory.
        #[arg(long)]
        force: bool,
        /// Seeds run in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also evaluate the NTK and bound calculators into summary.json.
        #[arg(long)]
        analyze: bool,
    },
    /// Evaluate the effective dimension, D_+ and the regret-bound curve.
    Analyze {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check a config and report every invalid field.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code(err: &Error) -> ExitCode {
    match err {
        Error::Validation(_) | Error::Config(_) => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn report(err: &Error) {
    match err {
        Error::Validation(problems) => {
            eprintln!("invalid configuration:");
            for p in problems {
                eprintln!("  {p}");
            }
        }
        other => eprintln!("error: {other}"),
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            cfg.validate()?;
            println!(
                "{}: ok ({}, K = {}, T = {}, delay {}, {} seeds)",
                config.display(),
                cfg.policy.algorithm.name(),
                cfg.arms(),
                cfg.horizon,
                cfg.effective_delay()?,
                cfg.seeds.len()
            );
            Ok(())
        }
        Command::Analyze { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = harness::analyze(&cfg)?;
            let json =
                serde_json::to_string_pretty(&report).map_err(|e| Error::Numeric(e.to_string()))?;
            println!("{json}");
            Ok(())
        }
        Command::Run {
            config,
            seeds,
            out,
            force,
            jobs,
            analyze,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seeds) = seeds {
                cfg.seeds = seeds;
            }
            cfg.validate()?;
            let dir = out.or_else(|| cfg.output.clone()).ok_or_else(|| {
                Error::Argument("no output directory: pass --out or set `output`".into())
            })?;
            let analysis = if analyze {
                Some(harness::analyze(&cfg)?)
            } else {
                None
            };
            let results = harness::run_experiment(&cfg, jobs)?;
            harness::emit(&cfg, &results, analysis.as_ref(), &dir, force)?;
            for r in &results {
                println!("seed {}: final regret {}", r.seed, r.final_regret());
            }
            println!("wrote {}", dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            report(&err);
            exit_code(&err)
        }
    }
}
