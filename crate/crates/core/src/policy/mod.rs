//! Decision-making agents driven round by round by the environment loop.
//!
//! Every policy follows the same protocol for round `t`: [`Policy::select`]
//! with the round's contexts, then [`Policy::ingest`] with the rewards whose
//! reveal round is `t` (possibly none). Rewards are only ever seen through
//! `ingest`, so a decision at round `t` depends on rewards revealed through
//! round `t - 1` and contexts through round `t`.

mod gamma;
mod linear;
mod neural;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::record::BanditRecord;
pub use gamma::{gamma_t, validate_delta, GammaMode, GammaParams, RadiusForm};
pub use linear::{LinearConfig, LinearPolicy};
pub use neural::{NeuralPolicy, PolicyConfig, RetrainTrigger, StepSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exploration {
    Ucb,
    Ts,
}

/// Per-arm diagnostics of one decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmScore {
    /// Predicted mean reward.
    pub mean: f64,
    /// UCB bonus, or the sampled deviation from the mean under TS.
    pub exploration: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Zero-based arm index.
    pub arm: usize,
    pub scores: Vec<ArmScore>,
}

pub trait Policy: Send {
    fn select(&mut self, round: usize, contexts: &[Vec<f64>]) -> Result<Selection>;

    /// Consumes the rewards revealed at `round`, which must be the round of
    /// the latest `select`.
    fn ingest(&mut self, round: usize, batch: Vec<BanditRecord>) -> Result<()>;

    fn revealed_count(&self) -> usize;

    fn pending_count(&self) -> usize;

    /// Exploration multiplier that will be used at the next decision.
    fn gamma(&self) -> f64;
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: impl IntoIterator<Item = f64>) -> usize {
    let mut iter = scores.into_iter().enumerate();
    let Some((_, mut best_score)) = iter.next() else {
        return 0;
    };
    let mut best = 0;
    for (i, s) in iter {
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

/// Reveal bookkeeping shared by all policies.
#[derive(Debug, Clone, Default)]
struct RevealBook {
    round: usize,
    selected: bool,
    revealed: Vec<BanditRecord>,
    /// round -> (context, action) for actions whose reward is unrevealed
    pending: BTreeMap<usize, (Vec<f64>, usize)>,
}

impl RevealBook {
    fn begin(&mut self, round: usize) -> Result<()> {
        if round != self.round + 1 || (self.round > 0 && self.selected) {
            return Err(Error::Protocol(format!(
                "select called for round {round} after round {} (ingested: {})",
                self.round, !self.selected
            )));
        }
        Ok(())
    }

    fn record_choice(&mut self, round: usize, context: Vec<f64>, action: usize) {
        self.round = round;
        self.selected = true;
        self.pending.insert(round, (context, action));
    }

    /// Validates the batch and returns it sorted by round; nothing is moved yet.
    fn check_batch(&self, round: usize, mut batch: Vec<BanditRecord>) -> Result<Vec<BanditRecord>> {
        if round != self.round || !self.selected {
            return Err(Error::Protocol(format!(
                "ingest for round {round} but the current round is {}",
                self.round
            )));
        }
        batch.sort_by_key(|r| r.round);
        for pair in batch.windows(2) {
            if pair[0].round == pair[1].round {
                return Err(Error::Protocol(format!(
                    "round {} revealed twice in one batch",
                    pair[0].round
                )));
            }
        }
        for rec in &batch {
            match self.pending.get(&rec.round) {
                None => {
                    return Err(Error::Protocol(format!(
                        "reward for round {} is not pending",
                        rec.round
                    )));
                }
                Some((_, action)) if *action != rec.action => {
                    return Err(Error::Protocol(format!(
                        "round {} chose arm {action}, record claims arm {}",
                        rec.round, rec.action
                    )));
                }
                Some(_) => {}
            }
        }
        Ok(batch)
    }

    fn accept(&mut self, rec: BanditRecord) {
        self.pending.remove(&rec.round);
        self.revealed.push(rec);
    }

    fn finish_round(&mut self) {
        self.selected = false;
    }
}

fn check_contexts(contexts: &[Vec<f64>], dim: usize) -> Result<()> {
    if contexts.is_empty() {
        return Err(Error::Argument("at least one arm is required".into()));
    }
    for (a, x) in contexts.iter().enumerate() {
        if x.len() != dim {
            return Err(Error::Argument(format!(
                "context of arm {a} has dimension {}, expected {dim}",
                x.len()
            )));
        }
    }
    Ok(())
}
