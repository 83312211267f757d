//! Dataset loaders, classification-to-bandit transforms and synthetic rewards.

mod idx;
mod mushroom;
mod synthetic;

use std::sync::Arc;

use rand::seq::SliceRandom;

use crate::env::{ContextSource, RoundView};
use crate::error::{Error, Result};
use crate::rng::StreamRng;
pub use idx::{load_idx, parse_images, parse_labels};
pub use mushroom::{
    load_mushroom_csv, parse_mushroom, surrogate_csv, ATTRIBUTES as MUSHROOM_ATTRIBUTES,
};
pub use synthetic::{unit_vector, SyntheticH, SyntheticKind, SyntheticSource};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: Vec<f64>,
    pub label: usize,
}

/// Arm `a` gets `x` in block `a` and zeros elsewhere.
pub fn disjoint_transform(x: &[f64], arms: usize) -> Vec<Vec<f64>> {
    let d0 = x.len();
    (0..arms)
        .map(|a| {
            let mut v = vec![0.0; d0 * arms];
            v[a * d0..(a + 1) * d0].copy_from_slice(x);
            v
        })
        .collect()
}

/// `(x, x) / (sqrt(2) |x|)`: unit norm with equal halves.
pub fn assumption3_embed(x: &[f64]) -> Result<Vec<f64>> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::DegenerateContext(format!(
            "cannot normalize a context of norm {norm}"
        )));
    }
    let scale = 1.0 / (std::f64::consts::SQRT_2 * norm);
    let half: Vec<f64> = x.iter().map(|v| v * scale).collect();
    Ok([half.as_slice(), half.as_slice()].concat())
}

/// A K-class dataset played as a K-armed bandit: reward 1 for the true class,
/// `wrong_class_reward` otherwise. Samples are visited in a fresh shuffle each
/// pass over the data.
#[derive(Debug, Clone)]
pub struct ClassificationSource {
    samples: Arc<Vec<LabeledSample>>,
    arms: usize,
    embed: bool,
    wrong_class_reward: f64,
    order: Vec<usize>,
    next: usize,
}

impl ClassificationSource {
    pub fn new(
        samples: Arc<Vec<LabeledSample>>,
        arms: usize,
        embed: bool,
        wrong_class_reward: f64,
    ) -> Result<Self> {
        if arms < 2 {
            return Err(Error::Config(format!(
                "a classification bandit needs K >= 2, got {arms}"
            )));
        }
        let Some(first) = samples.first() else {
            return Err(Error::Config("dataset is empty".into()));
        };
        let d0 = first.features.len();
        for (i, s) in samples.iter().enumerate() {
            if s.label >= arms {
                return Err(Error::Config(format!(
                    "sample {i} has label {} but K = {arms}",
                    s.label
                )));
            }
            if s.features.len() != d0 {
                return Err(Error::Config(format!(
                    "sample {i} has {} features, expected {d0}",
                    s.features.len()
                )));
            }
            if s.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("sample {i} has non-finite features")));
            }
        }
        if !wrong_class_reward.is_finite() {
            return Err(Error::Config("wrong_class_reward must be finite".into()));
        }
        let order = (0..samples.len()).collect();
        Ok(Self {
            next: samples.len(),
            samples,
            arms,
            embed,
            wrong_class_reward,
            order,
        })
    }

    pub fn raw_dim(&self) -> usize {
        self.samples[0].features.len()
    }
}

impl ContextSource for ClassificationSource {
    fn arms(&self) -> usize {
        self.arms
    }

    fn dim(&self) -> usize {
        self.raw_dim() * self.arms * if self.embed { 2 } else { 1 }
    }

    fn draw(&mut self, rng: &mut StreamRng) -> Result<RoundView> {
        if self.next == self.order.len() {
            self.order.shuffle(rng);
            self.next = 0;
        }
        let sample = &self.samples[self.order[self.next]];
        self.next += 1;
        let mut contexts = disjoint_transform(&sample.features, self.arms);
        if self.embed {
            contexts = contexts
                .iter()
                .map(|x| assumption3_embed(x))
                .collect::<Result<_>>()?;
        }
        let means = (0..self.arms)
            .map(|a| {
                if a == sample.label {
                    1.0
                } else {
                    self.wrong_class_reward
                }
            })
            .collect();
        Ok(RoundView { contexts, means })
    }
}
