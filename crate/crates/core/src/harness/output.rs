//! CSV and JSON artifacts of an experiment.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::analysis::AnalysisReport;
use super::config::ExperimentConfig;
use super::run::{aggregate, RunResult};
use crate::error::{Error, Result};

pub const RUN_HEADER: &str = "round,arm,regret,cum_regret,revealed,pending,gamma";
pub const MEAN_HEADER: &str = "round,mean,min,max";

/// Per-round CSV of one run. Floats use shortest round-trip formatting.
pub fn run_csv(result: &RunResult) -> String {
    let mut out = String::with_capacity(64 * (result.rows.len() + 1));
    out.push_str(RUN_HEADER);
    out.push('\n');
    for r in &result.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.round, r.arm, r.regret, r.cum_regret, r.revealed, r.pending, r.gamma
        )
        .expect("writing to a String");
    }
    out
}

#[derive(Serialize)]
struct SeedSummary {
    seed: u64,
    final_regret: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_gradient_norm: Option<f64>,
}

#[derive(Serialize)]
struct Summary<'a> {
    algorithm: &'static str,
    delay: String,
    config: &'a ExperimentConfig,
    seeds: Vec<SeedSummary>,
    mean_final_regret: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    analysis: Option<&'a AnalysisReport>,
}

#[derive(Serialize)]
struct Timing {
    seed: u64,
    wall_seconds: f64,
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `run_<seed>.csv`, `mean.csv`, `summary.json` and `timing.json`.
///
/// Everything except `timing.json` is a pure function of the config and
/// seeds. An existing non-empty directory is only written into with `force`.
pub fn emit(
    cfg: &ExperimentConfig,
    results: &[RunResult],
    analysis: Option<&AnalysisReport>,
    dir: &Path,
    force: bool,
) -> Result<()> {
    let agg = aggregate(results)?;
    if dir.exists() {
        let mut entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        if entries.next().is_some() && !force {
            return Err(Error::Argument(format!(
                "output directory {} is not empty (use --force to overwrite)",
                dir.display()
            )));
        }
    } else {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }

    for r in results {
        write(&dir.join(format!("run_{}.csv", r.seed)), &run_csv(r))?;
    }

    let mut mean = String::from(MEAN_HEADER);
    mean.push('\n');
    for t in 0..agg.mean.len() {
        writeln!(
            mean,
            "{},{},{},{}",
            t + 1,
            agg.mean[t],
            agg.min[t],
            agg.max[t]
        )
        .expect("writing to a String");
    }
    write(&dir.join("mean.csv"), &mean)?;

    let summary = Summary {
        algorithm: cfg.policy.algorithm.name(),
        delay: cfg.effective_delay()?.to_string(),
        config: cfg,
        seeds: results
            .iter()
            .map(|r| SeedSummary {
                seed: r.seed,
                final_regret: r.final_regret(),
                max_gradient_norm: r.max_gradient_norm,
            })
            .collect(),
        mean_final_regret: agg.mean.last().copied().unwrap_or(0.0),
        analysis,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Numeric(e.to_string()))?;
    write(&dir.join("summary.json"), &(json + "\n"))?;

    let timing: Vec<Timing> = results
        .iter()
        .map(|r| Timing {
            seed: r.seed,
            wall_seconds: r.wall_seconds,
        })
        .collect();
    let json = serde_json::to_string_pretty(&timing).map_err(|e| Error::Numeric(e.to_string()))?;
    write(&dir.join("timing.json"), &(json + "\n"))
}
