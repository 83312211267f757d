//! Theory calculators evaluated on a configured environment.

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::run::{build_source, load_dataset};
use crate::error::Result;
use crate::ntk::{self, DPlus, DelayBoundParams, RegretBoundParams};
use crate::rng::{stream, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub horizon: usize,
    pub d_plus: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    /// Number of contexts in the sampled Gram matrix.
    pub contexts: usize,
    pub min_eigenvalue: f64,
    pub d_tilde: f64,
    /// Delay constant at the configured horizon.
    #[serde(rename = "D_plus")]
    pub d_plus: DPlus,
    pub bound_curve: Vec<BoundPoint>,
}

/// Samples `analysis.rounds` rounds of contexts from the first seed's
/// context stream and evaluates the NTK, delay and regret-bound calculators.
pub fn analyze(cfg: &ExperimentConfig) -> Result<AnalysisReport> {
    cfg.validate()?;
    let dataset = load_dataset(cfg)?;
    let mut source = build_source(cfg, dataset.as_ref())?;
    let mut rng = stream(cfg.seeds[0], Stream::Context);
    let mut contexts = Vec::new();
    for _ in 0..cfg.analysis.rounds {
        contexts.extend(source.draw(&mut rng)?.contexts);
    }
    let p = &cfg.policy;
    let gram = ntk::ntk_gram(&contexts, p.depth)?;
    let n = contexts.len() as f64;
    let d_tilde = ntk::effective_dimension(&gram.h, p.lambda, n)?;
    let min_eigenvalue = ntk::min_eigenvalue(&gram.h);
    let expected_delay = cfg.effective_delay()?.mean();
    let delay_params = |horizon: usize| DelayBoundParams {
        horizon,
        delta: p.delta,
        expected_delay,
        alpha: cfg.analysis.alpha,
        b: cfg.analysis.b,
    };
    let d_plus = ntk::d_plus(&delay_params(cfg.horizon))?;
    let points = cfg.analysis.curve_points.min(cfg.horizon);
    let steps = p.step_schedule().map_or(0, |s| s.steps_at(cfg.horizon));
    let mut bound_curve = Vec::with_capacity(points);
    for i in 1..=points {
        let horizon = (cfg.horizon * i / points).max(1);
        let dp = ntk::d_plus(&delay_params(horizon))?.d_plus;
        let bound = ntk::regret_bound(&RegretBoundParams {
            horizon,
            arms: cfg.arms(),
            lambda: p.lambda,
            nu: p.nu,
            delta: p.delta,
            s: p.s,
            radius: p.radius,
            d_tilde,
            d_plus: dp,
            eta: p.eta,
            width: p.width,
            steps,
            depth: p.depth,
            c4: cfg.analysis.c4,
        })?;
        bound_curve.push(BoundPoint {
            horizon,
            d_plus: dp,
            bound,
        });
    }
    Ok(AnalysisReport {
        contexts: contexts.len(),
        min_eigenvalue,
        d_tilde,
        d_plus,
        bound_curve,
    })
}
