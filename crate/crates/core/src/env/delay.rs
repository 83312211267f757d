//! Delay distributions and the expected-delay parameterizations.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DelayDistribution {
    None,
    Constant {
        value: f64,
    },
    /// Uniform on `[0, max]`.
    Uniform {
        max: f64,
    },
    Exponential {
        rate: f64,
    },
    /// Classic Pareto with support `[scale, inf)`.
    Pareto {
        shape: f64,
        scale: f64,
    },
    /// Pareto shifted to start at zero, mean `scale / (shape - 1)`.
    Lomax {
        shape: f64,
        scale: f64,
    },
}

/// Distribution family, for building a distribution from its expected delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DelayFamily {
    None,
    Constant,
    Uniform,
    Exponential,
    Pareto,
    Lomax,
}

impl DelayDistribution {
    /// Standard parameterization by expected delay `mean`:
    /// exponential rate `1/mean`, uniform on `[0, 2 mean]`, Pareto with
    /// `a = (1 + mean)/mean` and `x_m = 1`.
    ///
    /// The classic Pareto built this way has mean `1 + mean`; the Lomax family
    /// with the same shape has mean exactly `mean`.
    pub fn from_expected(family: DelayFamily, mean: f64) -> Result<Self> {
        if !(mean >= 0.0) || !mean.is_finite() {
            return Err(Error::Config(format!(
                "expected delay must be finite and >= 0, got {mean}"
            )));
        }
        let needs_positive = |name: &str| {
            if mean > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{name} delay needs a positive expected delay"
                )))
            }
        };
        let dist = match family {
            DelayFamily::None => DelayDistribution::None,
            DelayFamily::Constant => DelayDistribution::Constant { value: mean },
            DelayFamily::Uniform => {
                needs_positive("uniform")?;
                DelayDistribution::Uniform { max: 2.0 * mean }
            }
            DelayFamily::Exponential => {
                needs_positive("exponential")?;
                DelayDistribution::Exponential { rate: 1.0 / mean }
            }
            DelayFamily::Pareto => {
                needs_positive("pareto")?;
                DelayDistribution::Pareto {
                    shape: (1.0 + mean) / mean,
                    scale: 1.0,
                }
            }
            DelayFamily::Lomax => {
                needs_positive("lomax")?;
                DelayDistribution::Lomax {
                    shape: (1.0 + mean) / mean,
                    scale: 1.0,
                }
            }
        };
        Ok(dist)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match *self {
            DelayDistribution::None => Ok(()),
            DelayDistribution::Constant { value } if !(value >= 0.0 && value.is_finite()) => bad(
                format!("constant delay must be finite and >= 0, got {value}"),
            ),
            DelayDistribution::Uniform { max } if !(max > 0.0 && max.is_finite()) => {
                bad(format!("uniform delay bound must be > 0, got {max}"))
            }
            DelayDistribution::Exponential { rate } if !(rate > 0.0 && rate.is_finite()) => {
                bad(format!("exponential rate must be > 0, got {rate}"))
            }
            DelayDistribution::Pareto { shape, scale }
            | DelayDistribution::Lomax { shape, scale }
                if !(shape > 1.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()) =>
            {
                bad(format!(
                    "pareto delay needs shape > 1 and scale > 0, got a={shape}, x_m={scale}"
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DelayDistribution::None => 0.0,
            DelayDistribution::Constant { value } => value,
            DelayDistribution::Uniform { max } => max / 2.0,
            DelayDistribution::Exponential { rate } => 1.0 / rate,
            DelayDistribution::Pareto { shape, scale } => shape * scale / (shape - 1.0),
            DelayDistribution::Lomax { shape, scale } => scale / (shape - 1.0),
        }
    }

    /// One nonnegative draw. `None` and `Constant` consume no randomness.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // u in (0, 1]
        let mut unit = || 1.0 - rng.random::<f64>();
        match *self {
            DelayDistribution::None => 0.0,
            DelayDistribution::Constant { value } => value,
            DelayDistribution::Uniform { max } => max * rng.random::<f64>(),
            DelayDistribution::Exponential { rate } => -unit().ln() / rate,
            DelayDistribution::Pareto { shape, scale } => scale * unit().powf(-1.0 / shape),
            DelayDistribution::Lomax { shape, scale } => scale * (unit().powf(-1.0 / shape) - 1.0),
        }
    }
}

impl fmt::Display for DelayDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DelayDistribution::None => write!(f, "None"),
            DelayDistribution::Constant { value } => write!(f, "Constant({value})"),
            DelayDistribution::Uniform { max } => write!(f, "Uniform(0, {max})"),
            DelayDistribution::Exponential { rate } => write!(f, "Exponential(rate={rate})"),
            DelayDistribution::Pareto { shape, scale } => {
                write!(f, "Pareto(a={shape}, x_m={scale})")
            }
            DelayDistribution::Lomax { shape, scale } => write!(f, "Lomax(a={shape}, x_m={scale})"),
        }
    }
}
