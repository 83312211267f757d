//! Reward generation, delay sampling and reveal scheduling.

mod delay;
mod queue;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{stream, Stream, StreamRng};
pub use delay::{DelayDistribution, DelayFamily};
pub use queue::{reveal_round, RevealQueue};

/// Default reward noise standard deviation (variance 0.001).
pub const DEFAULT_NOISE_SIGMA: f64 = 0.031_622_776_601_683_79;

/// Contexts offered to the learner in one round, with the hidden mean reward of each arm.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundView {
    pub contexts: Vec<Vec<f64>>,
    pub means: Vec<f64>,
}

/// Anything that can produce per-round contexts and their mean rewards.
pub trait ContextSource: Send {
    fn arms(&self) -> usize;

    /// Dimension of each arm's context as seen by the learner.
    fn dim(&self) -> usize;

    fn draw(&mut self, rng: &mut StreamRng) -> Result<RoundView>;
}

/// Per-stream seeds. Changing one leaves the other sequences untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvSeeds {
    pub context: u64,
    pub noise: u64,
    pub delay: u64,
}

impl EnvSeeds {
    pub fn uniform(seed: u64) -> Self {
        Self {
            context: seed,
            noise: seed,
            delay: seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub delay: f64,
    /// `max_a h(x_a) - h(x_action)`.
    pub regret: f64,
    pub best_arm: usize,
}

pub struct Environment {
    source: Box<dyn ContextSource>,
    noise_sigma: f64,
    delay: DelayDistribution,
    context_rng: StreamRng,
    noise_rng: StreamRng,
    delay_rng: StreamRng,
    round: usize,
    current: Option<RoundView>,
}

impl std::fmt::Debug for Environment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Environment")
            .field("arms", &self.source.arms())
            .field("dim", &self.source.dim())
            .field("noise_sigma", &self.noise_sigma)
            .field("delay", &self.delay)
            .field("round", &self.round)
            .finish()
    }
}

impl Environment {
    pub fn new(
        source: Box<dyn ContextSource>,
        noise_sigma: f64,
        delay: DelayDistribution,
        seeds: EnvSeeds,
    ) -> Result<Self> {
        if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
            return Err(Error::Config(format!(
                "noise sigma must be finite and >= 0, got {noise_sigma}"
            )));
        }
        delay.validate()?;
        if source.arms() == 0 {
            return Err(Error::Config("context source has no arms".into()));
        }
        Ok(Self {
            source,
            noise_sigma,
            delay,
            context_rng: stream(seeds.context, Stream::Context),
            noise_rng: stream(seeds.noise, Stream::Noise),
            delay_rng: stream(seeds.delay, Stream::Delay),
            round: 0,
            current: None,
        })
    }

    pub fn arms(&self) -> usize {
        self.source.arms()
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn delay(&self) -> DelayDistribution {
        self.delay
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    /// Draws the contexts of round `t`, which must follow the last stepped round.
    pub fn observe(&mut self, t: usize) -> Result<&[Vec<f64>]> {
        if t != self.round + 1 || self.current.is_some() {
            return Err(Error::Protocol(format!(
                "observe({t}) after round {}",
                self.round
            )));
        }
        let view = self.source.draw(&mut self.context_rng)?;
        if view.contexts.len() != view.means.len() || view.contexts.len() != self.source.arms() {
            return Err(Error::Numeric(
                "context source returned inconsistent arm counts".into(),
            ));
        }
        self.round = t;
        Ok(&self.current.insert(view).contexts)
    }

    /// Plays zero-based `action` in the observed round. Every call draws one
    /// noise value and one delay, whatever the distribution.
    pub fn step(&mut self, t: usize, action: usize) -> Result<StepOutcome> {
        if t != self.round {
            return Err(Error::Protocol(format!(
                "step({t}) but round {} was observed",
                self.round
            )));
        }
        let view = self
            .current
            .take()
            .ok_or_else(|| Error::Protocol(format!("step({t}) called twice")))?;
        if action >= view.means.len() {
            self.current = Some(view);
            return Err(Error::Argument(format!(
                "action {action} out of range for {} arms",
                self.source.arms()
            )));
        }
        let best_arm = crate::policy::argmax(view.means.iter().copied());
        let z: f64 = StandardNormal.sample(&mut self.noise_rng);
        let delay = self.delay.sample(&mut self.delay_rng);
        Ok(StepOutcome {
            reward: view.means[action] + self.noise_sigma * z,
            delay,
            regret: view.means[best_arm] - view.means[action],
            best_arm,
        })
    }
}
