//! Neural contextual bandits under stochastic delayed reward feedback.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: the ReLU reward network, its exact gradient and regularized training.
//! - [`design`]: the Gram accumulator behind the confidence widths.
//! - [`policy`]: delayed NeuralUCB / NeuralTS plus LinUCB / LinTS baselines.
//! - [`env`]: reward generation, delay sampling and reveal scheduling.
//! - [`data`]: IDX and agaricus CSV loaders, context transforms, synthetic rewards.
//! - [`ntk`]: NTK Gram matrix, effective dimension and regret-bound calculators.
//! - [`harness`]: declarative experiment configs, replicate runs and CSV/JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod design;
pub mod env;
pub mod error;
pub mod harness;
pub mod model;
pub mod ntk;
pub mod policy;
pub mod record;
pub mod rng;

pub use error::{Error, Result};
pub use record::BanditRecord;
