//! Synthetic reward functions on unit-sphere arm features.

use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::assumption3_embed;
use crate::env::{ContextSource, RoundView};
use crate::error::{Error, Result};
use crate::rng::{stream, Stream, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    Linear,
    QuadraticClipped,
    CosineClipped,
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(SyntheticKind::Linear),
            "quadratic-clipped" => Ok(SyntheticKind::QuadraticClipped),
            "cosine-clipped" => Ok(SyntheticKind::CosineClipped),
            other => Err(Error::Config(format!(
                "unknown synthetic reward function {other:?}"
            ))),
        }
    }
}

/// A reward function `h(x)` clamped to `[0, 1]`, parameterized by a unit vector `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticH {
    kind: SyntheticKind,
    a: Vec<f64>,
}

/// Uniform draw from the unit sphere in `dim` dimensions.
pub fn unit_vector(dim: usize, rng: &mut StreamRng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

impl SyntheticH {
    /// `a` drawn from the sphere with the given seed.
    pub fn new(kind: SyntheticKind, dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("synthetic dimension must be positive".into()));
        }
        let a = unit_vector(dim, &mut stream(seed, Stream::RewardFunction));
        Ok(Self { kind, a })
    }

    pub fn with_direction(kind: SyntheticKind, a: Vec<f64>) -> Result<Self> {
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::DegenerateContext("direction must be nonzero".into()));
        }
        Ok(Self {
            kind,
            a: a.into_iter().map(|x| x / norm).collect(),
        })
    }

    pub fn kind(&self) -> SyntheticKind {
        self.kind
    }

    pub fn direction(&self) -> &[f64] {
        &self.a
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let z: f64 = x.iter().zip(&self.a).map(|(x, a)| x * a).sum();
        let h = match self.kind {
            SyntheticKind::Linear => z,
            SyntheticKind::QuadraticClipped => z * z,
            SyntheticKind::CosineClipped => (1.0 + (3.0 * z).cos()) / 2.0,
        };
        h.clamp(0.0, 1.0)
    }
}

/// `K` independent unit-sphere arm features per round, scored by `h`.
#[derive(Debug, Clone)]
pub struct SyntheticSource {
    h: SyntheticH,
    arms: usize,
    embed: bool,
}

impl SyntheticSource {
    pub fn new(h: SyntheticH, arms: usize, embed: bool) -> Result<Self> {
        if arms == 0 {
            return Err(Error::Config("at least one arm is required".into()));
        }
        Ok(Self { h, arms, embed })
    }
}

impl ContextSource for SyntheticSource {
    fn arms(&self) -> usize {
        self.arms
    }

    fn dim(&self) -> usize {
        self.h.a.len() * if self.embed { 2 } else { 1 }
    }

    fn draw(&mut self, rng: &mut StreamRng) -> Result<RoundView> {
        let raw: Vec<Vec<f64>> = (0..self.arms)
            .map(|_| unit_vector(self.h.a.len(), rng))
            .collect();
        let means = raw.iter().map(|x| self.h.eval(x)).collect();
        let contexts = if self.embed {
            raw.iter()
                .map(|x| assumption3_embed(x))
                .collect::<Result<_>>()?
        } else {
            raw
        };
        Ok(RoundView { contexts, means })
    }
}
