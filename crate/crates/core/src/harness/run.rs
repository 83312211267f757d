//! Seeded replicate runs and their aggregation.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SourceKind};
use crate::data::{self, ClassificationSource, LabeledSample, SyntheticH, SyntheticSource};
use crate::env::{ContextSource, EnvSeeds, Environment, RevealQueue};
use crate::error::{Error, Result};
use crate::model::NetworkShape;
use crate::policy::{LinearConfig, LinearPolicy, NeuralPolicy, Policy, PolicyConfig};
use crate::record::BanditRecord;
use crate::rng::{stream, Stream};

/// One row of a run's trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub round: usize,
    /// Zero-based arm index.
    pub arm: usize,
    pub regret: f64,
    pub cum_regret: f64,
    pub revealed: usize,
    pub pending: usize,
    /// Exploration multiplier used for this round's decision.
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub seed: u64,
    pub rows: Vec<RunRow>,
    /// Largest `|g| / sqrt(m)` seen by a neural policy.
    pub max_gradient_norm: Option<f64>,
    pub wall_seconds: f64,
}

impl RunResult {
    pub fn final_regret(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.cum_regret)
    }

    pub fn cumulative(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.cum_regret).collect()
    }
}

/// Samples shared by all replicates, or `None` for synthetic sources.
pub fn load_dataset(cfg: &ExperimentConfig) -> Result<Option<Arc<Vec<LabeledSample>>>> {
    let env = &cfg.environment;
    let mut samples = match env.source {
        SourceKind::Synthetic => return Ok(None),
        SourceKind::Mushroom => {
            let path = cfg.resolve_data_path(env.path.as_deref(), "agaricus-lepiota.data");
            data::load_mushroom_csv(&path)?
        }
        SourceKind::MushroomSurrogate => {
            let text = data::surrogate_csv(env.surrogate_rows, env.reward_seed);
            data::parse_mushroom(&text, std::path::Path::new("<surrogate>"))?
        }
        SourceKind::Mnist => {
            let images = cfg.resolve_data_path(env.images.as_deref(), "train-images-idx3-ubyte");
            let labels = cfg.resolve_data_path(env.labels.as_deref(), "train-labels-idx1-ubyte");
            data::load_idx(&images, &labels)?
        }
    };
    if let Some(limit) = env.limit {
        samples.truncate(limit);
    }
    Ok(Some(Arc::new(samples)))
}

pub fn build_source(
    cfg: &ExperimentConfig,
    dataset: Option<&Arc<Vec<LabeledSample>>>,
) -> Result<Box<dyn ContextSource>> {
    let env = &cfg.environment;
    match (env.source, dataset) {
        (SourceKind::Synthetic, _) => {
            let h = SyntheticH::new(env.synthetic, env.dim, env.reward_seed)?;
            Ok(Box::new(SyntheticSource::new(
                h,
                cfg.arms(),
                env.embed_assumption3,
            )?))
        }
        (_, Some(samples)) => Ok(Box::new(ClassificationSource::new(
            Arc::clone(samples),
            cfg.arms(),
            env.embed_assumption3,
            env.wrong_class_reward,
        )?)),
        (_, None) => Err(Error::Config(
            "dataset source configured but no samples loaded".into(),
        )),
    }
}

/// Policy under test, with an accessor for the gradient-norm diagnostic.
enum Agent {
    Neural(NeuralPolicy),
    Linear(LinearPolicy),
}

impl Agent {
    fn policy(&mut self) -> &mut dyn Policy {
        match self {
            Agent::Neural(p) => p,
            Agent::Linear(p) => p,
        }
    }

    fn max_gradient_norm(&self) -> Option<f64> {
        match self {
            Agent::Neural(p) => Some(p.max_gradient_norm()),
            Agent::Linear(_) => None,
        }
    }
}

pub fn neural_config(cfg: &ExperimentConfig) -> Result<PolicyConfig> {
    let p = &cfg.policy;
    let shape = NetworkShape::new(p.depth, p.width, cfg.context_dim())?;
    Ok(PolicyConfig {
        lambda: p.lambda,
        nu: p.nu,
        delta: p.delta,
        s: p.s,
        c1: p.c1,
        c2: p.c2,
        c3: p.c3,
        gamma_mode: p.gamma_mode(),
        radius: p.radius,
        exploration: p.algorithm.exploration(),
        design_mode: p.design,
        eta: p.eta,
        steps: p
            .step_schedule()
            .ok_or_else(|| Error::Config(format!("policy.steps: {:?}", p.steps)))?,
        batch: p.batch_mode(),
        retrain: p.retrain_trigger(),
        warm_start: p.warm_start,
        ..PolicyConfig::new(shape)
    })
}

fn build_agent(cfg: &ExperimentConfig, seed: u64) -> Result<Agent> {
    let p = &cfg.policy;
    if p.algorithm.is_neural() {
        let policy_cfg = neural_config(cfg)?;
        let mut init = stream(seed, Stream::PolicyInit);
        Ok(Agent::Neural(NeuralPolicy::new(
            policy_cfg,
            &mut init,
            stream(seed, Stream::Policy),
        )?))
    } else {
        let lin = LinearConfig {
            lambda: p.lambda,
            alpha: p.alpha,
            nu: p.nu,
            ..LinearConfig::new(cfg.context_dim(), p.algorithm.exploration())
        };
        Ok(Agent::Linear(LinearPolicy::new(
            lin,
            stream(seed, Stream::Policy),
        )?))
    }
}

/// Drives one policy through `horizon` rounds: observe, select, step,
/// schedule, reveal, ingest.
pub fn run_loop(
    policy: &mut dyn Policy,
    env: &mut Environment,
    horizon: usize,
) -> Result<Vec<RunRow>> {
    let mut queue = RevealQueue::new();
    let mut rows = Vec::with_capacity(horizon);
    let mut cum_regret = 0.0;
    for t in 1..=horizon {
        let gamma = policy.gamma();
        let contexts = env.observe(t)?.to_vec();
        let selection = policy.select(t, &contexts)?;
        let arm = selection.arm;
        let outcome = env.step(t, arm)?;
        let record = BanditRecord::new(t, contexts[arm].clone(), arm, outcome.reward);
        queue.schedule(t, outcome.delay, record)?;
        policy.ingest(t, queue.pop_revealed(t)?)?;
        cum_regret += outcome.regret;
        rows.push(RunRow {
            round: t,
            arm,
            regret: outcome.regret,
            cum_regret,
            revealed: policy.revealed_count(),
            pending: policy.pending_count(),
            gamma,
        });
    }
    Ok(rows)
}

/// One replicate. Deterministic in `(cfg, seed)`.
pub fn run_seed(
    cfg: &ExperimentConfig,
    dataset: Option<&Arc<Vec<LabeledSample>>>,
    seed: u64,
) -> Result<RunResult> {
    let start = Instant::now();
    let source = build_source(cfg, dataset)?;
    let mut env = Environment::new(
        source,
        cfg.noise_sigma(),
        cfg.effective_delay()?,
        EnvSeeds::uniform(seed),
    )?;
    let mut agent = build_agent(cfg, seed)?;
    log::info!(
        "{} seed {seed}: starting {} rounds",
        cfg.policy.algorithm.name(),
        cfg.horizon
    );
    let rows = run_loop(agent.policy(), &mut env, cfg.horizon)?;
    let result = RunResult {
        seed,
        rows,
        max_gradient_norm: agent.max_gradient_norm(),
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    log::info!(
        "{} seed {seed}: final regret {} in {:.1}s",
        cfg.policy.algorithm.name(),
        result.final_regret(),
        result.wall_seconds
    );
    Ok(result)
}

/// Runs every configured seed, up to `jobs` at a time. Results follow the order of `cfg.seeds`.
pub fn run_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<RunResult>> {
    cfg.validate()?;
    let dataset = load_dataset(cfg)?;
    let dataset = dataset.as_ref();
    if jobs <= 1 {
        return cfg
            .seeds
            .iter()
            .map(|&s| run_seed(cfg, dataset, s))
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} worker threads: {e}")))?;
    pool.install(|| {
        cfg.seeds
            .par_iter()
            .map(|&s| run_seed(cfg, dataset, s))
            .collect()
    })
}

/// Pointwise mean and envelope of cumulative regret across replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

pub fn aggregate(results: &[RunResult]) -> Result<Aggregate> {
    let Some(first) = results.first() else {
        return Err(Error::Argument(
            "cannot aggregate an empty result list".into(),
        ));
    };
    let horizon = first.rows.len();
    if let Some(bad) = results.iter().find(|r| r.rows.len() != horizon) {
        return Err(Error::Argument(format!(
            "seed {} has {} rounds, seed {} has {horizon}",
            bad.seed,
            bad.rows.len(),
            first.seed
        )));
    }
    let n = results.len() as f64;
    let mut agg = Aggregate {
        mean: vec![0.0; horizon],
        min: vec![f64::INFINITY; horizon],
        max: vec![f64::NEG_INFINITY; horizon],
    };
    for t in 0..horizon {
        let mut sum = 0.0;
        for r in results {
            let v = r.rows[t].cum_regret;
            sum += v;
            agg.min[t] = agg.min[t].min(v);
            agg.max[t] = agg.max[t].max(v);
        }
        agg.mean[t] = sum / n;
    }
    Ok(agg)
}
