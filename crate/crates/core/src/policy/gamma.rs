//! Confidence-width multiplier for the UCB rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaMode {
    /// The full expression with the width-dependent correction terms.
    Theoretical,
    /// `nu * sqrt(logdet - 2 log delta) + sqrt(lambda) * S`.
    SimpleUcb,
    Constant(f64),
}

/// How the `sqrt(lambda) S` term is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusForm {
    /// `sqrt(lambda) * S`.
    #[default]
    SqrtLambdaTimesS,
    /// `sqrt(lambda * S)`.
    SqrtOfProduct,
}

impl RadiusForm {
    pub fn radius(self, lambda: f64, s: f64) -> f64 {
        match self {
            RadiusForm::SqrtLambdaTimesS => lambda.sqrt() * s,
            RadiusForm::SqrtOfProduct => (lambda * s).sqrt(),
        }
    }
}

/// Everything the multiplier depends on besides the revealed count and the
/// log-determinant ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    pub mode: GammaMode,
    pub radius: RadiusForm,
    pub lambda: f64,
    pub nu: f64,
    pub delta: f64,
    pub s: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub eta: f64,
    /// Network width `m`.
    pub width: usize,
    /// Network depth `L`.
    pub depth: usize,
    /// Gradient steps `J` used by the most recent training call.
    pub steps: usize,
}

pub fn validate_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "delta must lie in (0, 1), got {delta}"
        )))
    }
}

/// Multiplier after `revealed` rewards with `log det Z / det(lambda I) = logdet`.
pub fn gamma_t(p: &GammaParams, revealed: usize, logdet: f64) -> Result<f64> {
    validate_delta(p.delta)?;
    let n = revealed as f64;
    let radius = p.radius.radius(p.lambda, p.s);
    let value = match p.mode {
        GammaMode::Constant(c) => c,
        GammaMode::SimpleUcb => p.nu * (logdet - 2.0 * p.delta.ln()).max(0.0).sqrt() + radius,
        GammaMode::Theoretical => {
            let m = p.width as f64;
            let depth = p.depth as f64;
            let lambda = p.lambda;
            // m^{-1/6} sqrt(log m), shared by all correction terms
            let width_factor = m.powf(-1.0 / 6.0) * m.ln().max(0.0).sqrt();
            let inflation = (1.0
                + p.c1
                    * width_factor
                    * depth.powi(4)
                    * n.powf(7.0 / 6.0)
                    * lambda.powf(-7.0 / 6.0))
            .sqrt();
            let inner = logdet
                + p.c2 * width_factor * depth.powi(4) * n.powf(5.0 / 3.0) * lambda.powf(-1.0 / 6.0)
                - 2.0 * p.delta.ln();
            let confidence = inflation * (p.nu * inner.max(0.0).sqrt() + radius);
            let contraction = (1.0 - p.eta * m * lambda).abs().powf(p.steps as f64 / 2.0);
            let optimization = contraction * (n / lambda).sqrt()
                + width_factor
                    * depth.powf(3.5)
                    * n.powf(5.0 / 3.0)
                    * lambda.powf(-5.0 / 3.0)
                    * (1.0 + (n / lambda).sqrt());
            confidence + (lambda + p.c3 * n * depth) * optimization
        }
    };
    Ok(value)
}
