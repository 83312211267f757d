//! Declarative experiment configuration (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::SyntheticKind;
use crate::design::DesignMode;
use crate::env::{DelayDistribution, DelayFamily, DEFAULT_NOISE_SIGMA};
use crate::error::{Error, Result};
use crate::model::BatchMode;
use crate::policy::{Exploration, GammaMode, RadiusForm, RetrainTrigger, StepSchedule};

/// Environment variable naming the directory that relative dataset paths resolve against.
pub const DATA_ENV: &str = "DELAYED_BANDIT_DATA";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    DelayedNeuralUcb,
    DelayedNeuralTs,
    NeuralUcb,
    NeuralTs,
    LinUcb,
    LinTs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::DelayedNeuralUcb,
        Algorithm::DelayedNeuralTs,
        Algorithm::NeuralUcb,
        Algorithm::NeuralTs,
        Algorithm::LinUcb,
        Algorithm::LinTs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::DelayedNeuralUcb => "delayed-neural-ucb",
            Algorithm::DelayedNeuralTs => "delayed-neural-ts",
            Algorithm::NeuralUcb => "neural-ucb",
            Algorithm::NeuralTs => "neural-ts",
            Algorithm::LinUcb => "lin-ucb",
            Algorithm::LinTs => "lin-ts",
        }
    }

    /// Only the delayed variants see the configured delay; the others get
    /// every reward immediately.
    pub fn is_delayed(self) -> bool {
        matches!(
            self,
            Algorithm::DelayedNeuralUcb | Algorithm::DelayedNeuralTs
        )
    }

    pub fn is_neural(self) -> bool {
        !matches!(self, Algorithm::LinUcb | Algorithm::LinTs)
    }

    pub fn exploration(self) -> Exploration {
        match self {
            Algorithm::DelayedNeuralUcb | Algorithm::NeuralUcb | Algorithm::LinUcb => {
                Exploration::Ucb
            }
            _ => Exploration::Ts,
        }
    }
}

/// `J`: a fixed count or `"round"` for `J = t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepsSetting {
    Fixed(usize),
    Named(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaSetting {
    Theoretical,
    SimpleUcb,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicySection {
    pub algorithm: Algorithm,
    pub width: usize,
    pub depth: usize,
    pub lambda: f64,
    pub nu: f64,
    pub delta: f64,
    pub s: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub eta: f64,
    pub steps: StepsSetting,
    /// Mini-batch size; 0 trains on every revealed record.
    pub batch_size: usize,
    pub gamma: GammaSetting,
    pub gamma_constant: f64,
    pub radius: RadiusForm,
    pub design: DesignMode,
    pub retrain: RetrainSetting,
    pub warm_start: bool,
    /// LinUCB width multiplier.
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RetrainSetting {
    EveryRound,
    OnReveal,
}

impl Default for PolicySection {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::DelayedNeuralUcb,
            width: 128,
            depth: 2,
            lambda: 1.0,
            nu: 1.0,
            delta: 0.05,
            s: 1e-4,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            eta: 0.001,
            steps: StepsSetting::Named("round".into()),
            batch_size: 64,
            gamma: GammaSetting::SimpleUcb,
            gamma_constant: 1.0,
            radius: RadiusForm::SqrtLambdaTimesS,
            design: DesignMode::Diagonal,
            retrain: RetrainSetting::EveryRound,
            warm_start: false,
            alpha: 1.0,
        }
    }
}

impl PolicySection {
    pub fn step_schedule(&self) -> Option<StepSchedule> {
        match &self.steps {
            StepsSetting::Fixed(j) => Some(StepSchedule::Fixed(*j)),
            StepsSetting::Named(name) if name == "round" => Some(StepSchedule::Round),
            StepsSetting::Named(_) => None,
        }
    }

    pub fn batch_mode(&self) -> BatchMode {
        match self.batch_size {
            0 => BatchMode::FullBatch,
            n => BatchMode::MiniBatch(n),
        }
    }

    pub fn gamma_mode(&self) -> GammaMode {
        match self.gamma {
            GammaSetting::Theoretical => GammaMode::Theoretical,
            GammaSetting::SimpleUcb => GammaMode::SimpleUcb,
            GammaSetting::Constant => GammaMode::Constant(self.gamma_constant),
        }
    }

    pub fn retrain_trigger(&self) -> RetrainTrigger {
        match self.retrain {
            RetrainSetting::EveryRound => RetrainTrigger::EveryRound,
            RetrainSetting::OnReveal => RetrainTrigger::OnReveal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    Mushroom,
    Mnist,
    /// Generated agaricus-format rows, for running without the real file.
    MushroomSurrogate,
    Synthetic,
}

/// Delay block: either `expected` with a family, or explicit parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelaySpec {
    pub kind: DelayFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl Default for DelaySpec {
    fn default() -> Self {
        Self::expected(DelayFamily::None, 0.0)
    }
}

impl DelaySpec {
    pub fn expected(kind: DelayFamily, mean: f64) -> Self {
        Self {
            kind,
            expected: Some(mean),
            value: None,
            max: None,
            rate: None,
            shape: None,
            scale: None,
        }
    }

    pub fn resolve(&self) -> Result<DelayDistribution> {
        let explicit = [self.value, self.max, self.rate, self.shape, self.scale];
        let dist = if let Some(mean) = self.expected {
            if explicit.iter().any(Option::is_some) {
                return Err(Error::Config(
                    "delay: give either `expected` or explicit parameters, not both".into(),
                ));
            }
            DelayDistribution::from_expected(self.kind, mean)?
        } else {
            let need = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| {
                    Error::Config(format!(
                        "delay: {:?} needs `{name}` or `expected`",
                        self.kind
                    ))
                })
            };
            match self.kind {
                DelayFamily::None => DelayDistribution::None,
                DelayFamily::Constant => DelayDistribution::Constant {
                    value: need(self.value, "value")?,
                },
                DelayFamily::Uniform => DelayDistribution::Uniform {
                    max: need(self.max, "max")?,
                },
                DelayFamily::Exponential => DelayDistribution::Exponential {
                    rate: need(self.rate, "rate")?,
                },
                DelayFamily::Pareto => DelayDistribution::Pareto {
                    shape: need(self.shape, "shape")?,
                    scale: self.scale.unwrap_or(1.0),
                },
                DelayFamily::Lomax => DelayDistribution::Lomax {
                    shape: need(self.shape, "shape")?,
                    scale: self.scale.unwrap_or(1.0),
                },
            }
        };
        dist.validate()?;
        Ok(dist)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvironmentSection {
    pub source: SourceKind,
    /// Mushroom CSV path.
    pub path: Option<PathBuf>,
    /// MNIST image and label files.
    pub images: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    /// Use only the first `limit` samples of the dataset.
    pub limit: Option<usize>,
    pub surrogate_rows: usize,
    pub synthetic: SyntheticKind,
    pub dim: usize,
    pub reward_seed: u64,
    pub noise_variance: f64,
    pub wrong_class_reward: f64,
    pub embed_assumption3: bool,
    pub delay: DelaySpec,
}

impl Default for EnvironmentSection {
    fn default() -> Self {
        Self {
            source: SourceKind::Mushroom,
            path: None,
            images: None,
            labels: None,
            limit: None,
            surrogate_rows: 8124,
            synthetic: SyntheticKind::QuadraticClipped,
            dim: 20,
            reward_seed: 0,
            noise_variance: DEFAULT_NOISE_SIGMA * DEFAULT_NOISE_SIGMA,
            wrong_class_reward: 0.0,
            embed_assumption3: false,
            delay: DelaySpec::default(),
        }
    }
}

/// Inputs of the `analyze` calculators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    /// Rounds of contexts sampled for the NTK Gram matrix (`n = rounds * K`).
    pub rounds: usize,
    /// Sub-exponential delay parameters.
    pub alpha: f64,
    pub b: f64,
    pub c4: f64,
    /// Horizons at which the bound curve is evaluated.
    pub curve_points: usize,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            rounds: 50,
            alpha: 0.0,
            b: 0.0,
            c4: 1.0,
            curve_points: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub horizon: usize,
    /// Defaults to the class count of the dataset (4 for synthetic sources).
    pub arms: Option<usize>,
    pub seeds: Vec<u64>,
    pub output: Option<PathBuf>,
    pub policy: PolicySection,
    pub environment: EnvironmentSection,
    pub analysis: AnalysisSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            horizon: 2000,
            arms: None,
            seeds: (0..5).collect(),
            output: None,
            policy: PolicySection::default(),
            environment: EnvironmentSection::default(),
            analysis: AnalysisSection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn arms(&self) -> usize {
        self.arms.unwrap_or(match self.environment.source {
            SourceKind::Mushroom | SourceKind::MushroomSurrogate => 2,
            SourceKind::Mnist => 10,
            SourceKind::Synthetic => 4,
        })
    }

    /// Delay the configured algorithm actually experiences.
    pub fn effective_delay(&self) -> Result<DelayDistribution> {
        let dist = self.environment.delay.resolve()?;
        Ok(if self.policy.algorithm.is_delayed() {
            dist
        } else {
            DelayDistribution::None
        })
    }

    pub fn noise_sigma(&self) -> f64 {
        self.environment.noise_variance.sqrt()
    }

    /// Checks every field and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        let p = &self.policy;
        let env = &self.environment;
        if self.horizon == 0 {
            errors.push("horizon: must be >= 1".to_string());
        }
        if self.seeds.is_empty() {
            errors.push("seeds: must not be empty".to_string());
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            errors.push("seeds: duplicates are not allowed".to_string());
        }
        let arms = self.arms();
        if arms == 0 || (arms < 2 && env.source != SourceKind::Synthetic) {
            errors.push(format!("arms: {arms} is too small for this source"));
        }
        if p.algorithm.is_neural() {
            if p.depth < 2 {
                errors.push(format!("policy.depth: must be >= 2, got {}", p.depth));
            }
            if p.width < 2 || !p.width.is_multiple_of(2) {
                errors.push(format!(
                    "policy.width: must be even and >= 2, got {}",
                    p.width
                ));
            }
            if !(p.eta > 0.0) || !p.eta.is_finite() {
                errors.push(format!("policy.eta: must be > 0, got {}", p.eta));
            }
            if p.step_schedule().is_none() {
                errors.push(format!(
                    "policy.steps: expected an integer or \"round\", got {:?}",
                    p.steps
                ));
            }
            if !self.context_dim().is_multiple_of(2) {
                errors.push(format!(
                    "environment: neural policies need an even context dimension, got {}",
                    self.context_dim()
                ));
            }
        }
        if !(p.lambda > 0.0) || !p.lambda.is_finite() {
            errors.push(format!("policy.lambda: must be > 0, got {}", p.lambda));
        }
        if !(p.nu >= 0.0) || !p.nu.is_finite() {
            errors.push(format!("policy.nu: must be >= 0, got {}", p.nu));
        }
        if !(p.delta > 0.0 && p.delta < 1.0) {
            errors.push(format!("policy.delta: must lie in (0, 1), got {}", p.delta));
        }
        if !(p.s >= 0.0) {
            errors.push(format!("policy.s: must be >= 0, got {}", p.s));
        }
        for (name, v) in [("c1", p.c1), ("c2", p.c2), ("c3", p.c3)] {
            if !(v >= 0.0) {
                errors.push(format!("policy.{name}: must be >= 0, got {v}"));
            }
        }
        if !(p.alpha >= 0.0) {
            errors.push(format!("policy.alpha: must be >= 0, got {}", p.alpha));
        }
        if p.gamma == GammaSetting::Constant
            && !(p.gamma_constant >= 0.0 && p.gamma_constant.is_finite())
        {
            errors.push(format!(
                "policy.gamma_constant: must be finite and >= 0, got {}",
                p.gamma_constant
            ));
        }
        if !(env.noise_variance >= 0.0) || !env.noise_variance.is_finite() {
            errors.push(format!(
                "environment.noise_variance: must be finite and >= 0, got {}",
                env.noise_variance
            ));
        }
        if !env.wrong_class_reward.is_finite() {
            errors.push("environment.wrong_class_reward: must be finite".to_string());
        }
        if env.source == SourceKind::Synthetic && env.dim == 0 {
            errors.push("environment.dim: must be positive".to_string());
        }
        if env.source == SourceKind::MushroomSurrogate && env.surrogate_rows == 0 {
            errors.push("environment.surrogate_rows: must be positive".to_string());
        }
        if env.limit == Some(0) {
            errors.push("environment.limit: must be positive".to_string());
        }
        if let Err(e) = env.delay.resolve() {
            errors.push(format!("environment.delay: {}", strip(e)));
        }
        let a = &self.analysis;
        if !(a.alpha >= 0.0) || !(a.b >= 0.0) || !(a.c4 >= 0.0) {
            errors.push("analysis: alpha, b and c4 must be >= 0".to_string());
        }
        if a.rounds == 0 || a.curve_points == 0 {
            errors.push("analysis: rounds and curve_points must be positive".to_string());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errors))
        }
    }

    /// Raw feature dimension of one class sample (or synthetic arm).
    fn raw_dim(&self) -> usize {
        match self.environment.source {
            SourceKind::Mushroom | SourceKind::MushroomSurrogate => {
                crate::data::MUSHROOM_ATTRIBUTES
            }
            SourceKind::Mnist => 784,
            SourceKind::Synthetic => self.environment.dim,
        }
    }

    /// Context dimension the policy sees.
    pub fn context_dim(&self) -> usize {
        let base = match self.environment.source {
            SourceKind::Synthetic => self.raw_dim(),
            _ => self.raw_dim() * self.arms(),
        };
        if self.environment.embed_assumption3 {
            2 * base
        } else {
            base
        }
    }

    /// Resolves a dataset path: absolute paths are kept, relative ones are
    /// looked up under `$DELAYED_BANDIT_DATA` when it is set.
    pub fn resolve_data_path(&self, configured: Option<&Path>, default_name: &str) -> PathBuf {
        let rel = configured
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(default_name));
        if rel.is_absolute() {
            return rel;
        }
        match std::env::var_os(DATA_ENV) {
            Some(root) => PathBuf::from(root).join(rel),
            None => rel,
        }
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(msg) => msg,
        other => other.to_string(),
    }
}
