use rand::Rng;
use rand_distr::StandardNormal;

use super::{
    argmax, check_contexts, ArmScore, Exploration, GammaMode, GammaParams, Policy, RadiusForm,
    RevealBook, Selection,
};
use crate::design::{DesignMatrix, DesignMode};
use crate::error::{Error, Result};
use crate::model::{self, BatchMode, NetworkShape, ParamVector, TrainSpec};
use crate::policy::gamma::{gamma_t, validate_delta};
use crate::record::BanditRecord;
use crate::rng::StreamRng;

/// Number of gradient steps per training call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepSchedule {
    Fixed(usize),
    /// `J = t` at round `t`.
    Round,
}

impl StepSchedule {
    pub fn steps_at(self, round: usize) -> usize {
        match self {
            StepSchedule::Fixed(j) => j,
            StepSchedule::Round => round,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetrainTrigger {
    /// Retrain at the end of every round once any reward is known.
    EveryRound,
    /// Retrain only in rounds that revealed at least one reward.
    OnReveal,
}

/// Settings of a neural policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyConfig {
    pub shape: NetworkShape,
    pub lambda: f64,
    pub nu: f64,
    pub delta: f64,
    pub s: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub gamma_mode: GammaMode,
    pub radius: RadiusForm,
    pub exploration: Exploration,
    pub design_mode: DesignMode,
    pub eta: f64,
    pub steps: StepSchedule,
    pub batch: BatchMode,
    pub retrain: RetrainTrigger,
    /// Start each training call from the current parameters instead of `theta_0`.
    pub warm_start: bool,
}

impl PolicyConfig {
    /// Defaults: `nu = 1`, `lambda = 1`, `delta = 0.05`, `S = 1e-4`,
    /// `C1 = C2 = C3 = 1`, `eta = 0.001`, batches of 64 and `J = t`.
    pub fn new(shape: NetworkShape) -> Self {
        Self {
            shape,
            lambda: 1.0,
            nu: 1.0,
            delta: 0.05,
            s: 1e-4,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            gamma_mode: GammaMode::SimpleUcb,
            radius: RadiusForm::SqrtLambdaTimesS,
            exploration: Exploration::Ucb,
            design_mode: DesignMode::Diagonal,
            eta: 0.001,
            steps: StepSchedule::Round,
            batch: BatchMode::MiniBatch(64),
            retrain: RetrainTrigger::EveryRound,
            warm_start: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_delta(self.delta)?;
        if !(self.nu >= 0.0) {
            return Err(Error::Config(format!("nu must be >= 0, got {}", self.nu)));
        }
        if !(self.s >= 0.0) || self.c1 < 0.0 || self.c2 < 0.0 || self.c3 < 0.0 {
            return Err(Error::Config("S and C1..C3 must be >= 0".into()));
        }
        self.train_spec(0).validate()
    }

    pub fn train_spec(&self, round: usize) -> TrainSpec {
        TrainSpec {
            lambda: self.lambda,
            eta: self.eta,
            steps: self.steps.steps_at(round),
            batch: self.batch,
        }
    }

    pub fn gamma_params(&self, steps: usize) -> GammaParams {
        GammaParams {
            mode: self.gamma_mode,
            radius: self.radius,
            lambda: self.lambda,
            nu: self.nu,
            delta: self.delta,
            s: self.s,
            c1: self.c1,
            c2: self.c2,
            c3: self.c3,
            eta: self.eta,
            width: self.shape.width(),
            depth: self.shape.depth(),
            steps,
        }
    }
}

/// Delayed NeuralUCB / NeuralTS.
///
/// With zero delays every reward is revealed in the round it was earned and
/// the policy reduces to ordinary NeuralUCB / NeuralTS.
#[derive(Debug, Clone)]
pub struct NeuralPolicy {
    cfg: PolicyConfig,
    theta0: ParamVector,
    theta: ParamVector,
    design: DesignMatrix,
    book: RevealBook,
    gamma: f64,
    rng: StreamRng,
    max_grad_norm: f64,
}

impl NeuralPolicy {
    /// Draws `theta_0` from `init_rng`; training batches and Thompson draws
    /// come from `rng`.
    pub fn new<R: Rng + ?Sized>(
        cfg: PolicyConfig,
        init_rng: &mut R,
        rng: StreamRng,
    ) -> Result<Self> {
        let theta0 = model::init_symmetric(cfg.shape, init_rng)?;
        Self::with_initial(cfg, theta0, rng)
    }

    pub fn with_initial(cfg: PolicyConfig, theta0: ParamVector, rng: StreamRng) -> Result<Self> {
        cfg.validate()?;
        if *theta0.shape() != cfg.shape {
            return Err(Error::Config(
                "initial parameters do not match the configured shape".into(),
            ));
        }
        if cfg.lambda < 1f64.max(cfg.s.powi(-2)) {
            log::warn!(
                "lambda = {} is below max(1, S^-2) = {}; the regret guarantee does not apply",
                cfg.lambda,
                1f64.max(cfg.s.powi(-2))
            );
        }
        let design = DesignMatrix::new(cfg.shape.param_count(), cfg.lambda, cfg.design_mode)?;
        let gamma = gamma_t(&cfg.gamma_params(cfg.steps.steps_at(0)), 0, 0.0)?;
        Ok(Self {
            theta: theta0.clone(),
            theta0,
            design,
            book: RevealBook::default(),
            gamma,
            rng,
            max_grad_norm: 0.0,
            cfg,
        })
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.cfg
    }

    pub fn theta(&self) -> &ParamVector {
        &self.theta
    }

    pub fn theta0(&self) -> &ParamVector {
        &self.theta0
    }

    pub fn design(&self) -> &DesignMatrix {
        &self.design
    }

    /// Rewards revealed so far, in reveal order.
    pub fn revealed(&self) -> &[BanditRecord] {
        &self.book.revealed
    }

    pub fn pending_rounds(&self) -> impl Iterator<Item = usize> + '_ {
        self.book.pending.keys().copied()
    }

    /// Largest `|g(x; theta)| / sqrt(m)` seen by any decision or update.
    pub fn max_gradient_norm(&self) -> f64 {
        self.max_grad_norm
    }

    /// `g(x; theta) / sqrt(m)` at the current parameters.
    fn scaled_gradient(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (f, g) = model::forward_gradient(&self.theta, x)?;
        let inv = 1.0 / (self.cfg.shape.width() as f64).sqrt();
        let mut u = g.into_values();
        let mut norm = 0.0;
        for v in u.iter_mut() {
            *v *= inv;
            norm += *v * *v;
        }
        self.max_grad_norm = self.max_grad_norm.max(norm.sqrt());
        Ok((f, u))
    }
}

impl Policy for NeuralPolicy {
    fn select(&mut self, round: usize, contexts: &[Vec<f64>]) -> Result<Selection> {
        self.book.begin(round)?;
        check_contexts(contexts, self.cfg.shape.input_dim())?;
        let mut scores = Vec::with_capacity(contexts.len());
        for x in contexts {
            let (mean, u) = self.scaled_gradient(x)?;
            let q = self.design.quad_form(&u)?;
            let exploration = match self.cfg.exploration {
                Exploration::Ucb => self.gamma * q.sqrt(),
                Exploration::Ts => {
                    let sigma = (self.cfg.lambda * q).sqrt();
                    let z: f64 = self.rng.sample(StandardNormal);
                    self.cfg.nu * sigma * z
                }
            };
            scores.push(ArmScore {
                mean,
                exploration,
                score: mean + exploration,
            });
        }
        let arm = argmax(scores.iter().map(|s| s.score));
        self.book.record_choice(round, contexts[arm].clone(), arm);
        Ok(Selection { arm, scores })
    }

    fn ingest(&mut self, round: usize, batch: Vec<BanditRecord>) -> Result<()> {
        let batch = self.book.check_batch(round, batch)?;
        let revealed_now = !batch.is_empty();
        // every gradient of this batch is taken at theta_{t-1}
        for rec in batch {
            let (_, u) = self.scaled_gradient(&rec.context)?;
            self.design.rank1_update(&u)?;
            self.book.accept(rec);
        }

        let retrain = match self.cfg.retrain {
            RetrainTrigger::EveryRound => !self.book.revealed.is_empty(),
            RetrainTrigger::OnReveal => revealed_now,
        };
        let spec = self.cfg.train_spec(round);
        if retrain {
            self.theta = if self.cfg.warm_start {
                model::train_nn_from(
                    &self.theta,
                    &self.theta0,
                    &self.book.revealed,
                    &spec,
                    &mut self.rng,
                )?
            } else {
                model::train_nn(&self.theta0, &self.book.revealed, &spec, &mut self.rng)?
            };
        }
        self.gamma = gamma_t(
            &self.cfg.gamma_params(spec.steps),
            self.book.revealed.len(),
            self.design.logdet_ratio(),
        )?;
        self.book.finish_round();
        Ok(())
    }

    fn revealed_count(&self) -> usize {
        self.book.revealed.len()
    }

    fn pending_count(&self) -> usize {
        self.book.pending.len()
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }
}
