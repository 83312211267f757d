use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{argmax, check_contexts, ArmScore, Exploration, Policy, RevealBook, Selection};
use crate::design::{DesignMatrix, DesignMode};
use crate::error::{Error, Result};
use crate::record::BanditRecord;
use crate::rng::StreamRng;

/// Ridge-regression baseline settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearConfig {
    pub dim: usize,
    pub lambda: f64,
    /// UCB width multiplier.
    pub alpha: f64,
    /// Posterior scale for Thompson sampling.
    pub nu: f64,
    pub exploration: Exploration,
}

impl LinearConfig {
    pub fn new(dim: usize, exploration: Exploration) -> Self {
        Self {
            dim,
            lambda: 1.0,
            alpha: 1.0,
            nu: 1.0,
            exploration,
        }
    }
}

/// LinUCB / LinTS on a single shared parameter vector.
///
/// `A = lambda I + sum x x^T`, `b = sum r x`, `theta_hat = A^{-1} b`. UCB scores
/// `x^T theta_hat + alpha sqrt(x^T A^{-1} x)`; TS scores `x^T theta_tilde` with
/// `theta_tilde ~ N(theta_hat, nu^2 A^{-1})`.
#[derive(Debug, Clone)]
pub struct LinearPolicy {
    cfg: LinearConfig,
    a: DesignMatrix,
    b: Vec<f64>,
    book: RevealBook,
    rng: StreamRng,
}

impl LinearPolicy {
    pub fn new(cfg: LinearConfig, rng: StreamRng) -> Result<Self> {
        if !(cfg.alpha >= 0.0) || !(cfg.nu >= 0.0) {
            return Err(Error::Config(format!(
                "alpha and nu must be >= 0, got alpha={}, nu={}",
                cfg.alpha, cfg.nu
            )));
        }
        Ok(Self {
            a: DesignMatrix::new(cfg.dim, cfg.lambda, DesignMode::Full)?,
            b: vec![0.0; cfg.dim],
            book: RevealBook::default(),
            rng,
            cfg,
        })
    }

    /// Current ridge estimate `A^{-1} b`.
    pub fn estimate(&self) -> Vec<f64> {
        self.a.solve(&self.b).expect("b has the design dimension")
    }

    fn sample_parameters(&mut self, mean: &[f64]) -> Result<Vec<f64>> {
        let z: Vec<f64> = (0..self.cfg.dim)
            .map(|_| self.rng.sample(StandardNormal))
            .collect();
        if self.cfg.nu == 0.0 {
            return Ok(mean.to_vec());
        }
        let cov: DMatrix<f64> = self.a.inverse();
        let chol = cov.cholesky().ok_or_else(|| {
            Error::Numeric("posterior covariance is not positive definite".into())
        })?;
        let dev = chol.l() * DVector::from_vec(z);
        Ok(mean
            .iter()
            .zip(dev.iter())
            .map(|(m, d)| m + self.cfg.nu * d)
            .collect())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Policy for LinearPolicy {
    fn select(&mut self, round: usize, contexts: &[Vec<f64>]) -> Result<Selection> {
        self.book.begin(round)?;
        check_contexts(contexts, self.cfg.dim)?;
        let theta_hat = self.estimate();
        let scores: Vec<ArmScore> = match self.cfg.exploration {
            Exploration::Ucb => contexts
                .iter()
                .map(|x| {
                    let mean = dot(x, &theta_hat);
                    let width = self.cfg.alpha * self.a.quad_form(x)?.sqrt();
                    Ok(ArmScore {
                        mean,
                        exploration: width,
                        score: mean + width,
                    })
                })
                .collect::<Result<_>>()?,
            Exploration::Ts => {
                let theta = self.sample_parameters(&theta_hat)?;
                contexts
                    .iter()
                    .map(|x| {
                        let mean = dot(x, &theta_hat);
                        let score = dot(x, &theta);
                        ArmScore {
                            mean,
                            exploration: score - mean,
                            score,
                        }
                    })
                    .collect()
            }
        };
        let arm = argmax(scores.iter().map(|s| s.score));
        self.book.record_choice(round, contexts[arm].clone(), arm);
        Ok(Selection { arm, scores })
    }

    fn ingest(&mut self, round: usize, batch: Vec<BanditRecord>) -> Result<()> {
        let batch = self.book.check_batch(round, batch)?;
        for rec in batch {
            self.a.rank1_update(&rec.context)?;
            for (bi, xi) in self.b.iter_mut().zip(&rec.context) {
                *bi += rec.reward * xi;
            }
            self.book.accept(rec);
        }
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
        match self.cfg.exploration {
            Exploration::Ucb => self.cfg.alpha,
            Exploration::Ts => self.cfg.nu,
        }
    }
}
