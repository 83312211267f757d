//! NTK Gram matrix, effective dimension, delay constant and regret bound.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::{validate_delta, RadiusForm};

/// Per-level kernels of the NTK recursion; index 0 is level 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NtkGram {
    pub sigma: Vec<DMatrix<f64>>,
    pub h_tilde: Vec<DMatrix<f64>>,
    /// `(H_tilde^(L) + Sigma^(L)) / 2`.
    pub h: DMatrix<f64>,
}

/// Closed-form `2 E[relu(u) relu(v)]` and `2 E[relu'(u) relu'(v)]` for
/// `(u, v) ~ N(0, [[s_ii, s_ij], [s_ij, s_jj]])`.
pub fn arccos_expectations(s_ii: f64, s_ij: f64, s_jj: f64) -> (f64, f64) {
    let scale = (s_ii * s_jj).sqrt();
    if !(scale > 0.0) {
        return (0.0, 0.0);
    }
    let theta = (s_ij / scale).clamp(-1.0, 1.0).acos();
    let value = scale / PI * (theta.sin() + (PI - theta) * theta.cos());
    let derivative = (PI - theta) / PI;
    (value, derivative)
}

pub fn ntk_gram(contexts: &[Vec<f64>], depth: usize) -> Result<NtkGram> {
    if depth < 2 {
        return Err(Error::Argument(format!(
            "depth must be at least 2, got {depth}"
        )));
    }
    let n = contexts.len();
    for (i, x) in contexts.iter().enumerate() {
        let norm: f64 = x.iter().map(|v| v * v).sum();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::DegenerateContext(format!(
                "context {i} has norm {}",
                norm.sqrt()
            )));
        }
        if x.len() != contexts[0].len() {
            return Err(Error::Argument(format!(
                "context {i} has a different dimension"
            )));
        }
    }
    let base = DMatrix::from_fn(n, n, |i, j| {
        contexts[i]
            .iter()
            .zip(&contexts[j])
            .map(|(a, b)| a * b)
            .sum()
    });
    let mut sigma = vec![base.clone()];
    let mut h_tilde = vec![base];
    for _ in 1..depth {
        let s = sigma.last().expect("level 1 present");
        let ht = h_tilde.last().expect("level 1 present");
        let mut next_s = DMatrix::zeros(n, n);
        let mut next_h = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let (value, derivative) = arccos_expectations(s[(i, i)], s[(i, j)], s[(j, j)]);
                let h = ht[(i, j)] * derivative + value;
                next_s[(i, j)] = value;
                next_s[(j, i)] = value;
                next_h[(i, j)] = h;
                next_h[(j, i)] = h;
            }
        }
        sigma.push(next_s);
        h_tilde.push(next_h);
    }
    let h = (h_tilde.last().expect("depth >= 2") + sigma.last().expect("depth >= 2")) / 2.0;
    Ok(NtkGram { sigma, h_tilde, h })
}

/// Smallest eigenvalue of a symmetric matrix (0 for an empty one).
pub fn min_eigenvalue(h: &DMatrix<f64>) -> f64 {
    if h.nrows() == 0 {
        return 0.0;
    }
    h.clone().symmetric_eigenvalues().min()
}

/// `log det(I + H/lambda) / log(1 + n/lambda)`, where `n` is the nominal
/// context count (`T K` in the bound).
pub fn effective_dimension(h: &DMatrix<f64>, lambda: f64, n: f64) -> Result<f64> {
    if !(lambda > 0.0) || !(n > 0.0) {
        return Err(Error::Argument(format!(
            "lambda and n must be positive, got {lambda} and {n}"
        )));
    }
    if !h.is_square() {
        return Err(Error::Argument("Gram matrix must be square".into()));
    }
    let dim = h.nrows();
    if dim == 0 {
        return Ok(0.0);
    }
    let trace = h.trace().abs();
    let tolerance = -1e-8 * trace.max(f64::MIN_POSITIVE) / dim as f64;
    let smallest = min_eigenvalue(h);
    if smallest < tolerance {
        return Err(Error::Numeric(format!(
            "Gram matrix is not PSD: eigenvalue {smallest}"
        )));
    }
    let shifted = DMatrix::identity(dim, dim) + h / lambda;
    let chol = shifted
        .cholesky()
        .ok_or_else(|| Error::Numeric("I + H/lambda is not positive definite".into()))?;
    let logdet = 2.0
        * chol
            .l_dirty()
            .diagonal()
            .iter()
            .map(|v| v.ln())
            .sum::<f64>();
    Ok(logdet / (1.0 + n / lambda).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayBoundParams {
    pub horizon: usize,
    pub delta: f64,
    pub expected_delay: f64,
    pub alpha: f64,
    /// Zero selects the sub-Gaussian branch.
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DPlus {
    pub d_plus: f64,
    pub d_tau: f64,
    pub psi_tau: f64,
}

pub fn d_plus(p: &DelayBoundParams) -> Result<DPlus> {
    validate_delta(p.delta)?;
    if p.horizon == 0 || !(p.expected_delay >= 0.0) || !(p.alpha >= 0.0) || !(p.b >= 0.0) {
        return Err(Error::Config(format!(
            "delay bound needs T >= 1 and nonnegative E[tau], alpha, b; got {p:?}"
        )));
    }
    let log_term = (3.0 * p.horizon as f64 / (2.0 * p.delta)).ln();
    let gaussian = (2.0 * p.alpha * p.alpha * log_term).sqrt();
    let d_tau = if p.b == 0.0 {
        gaussian
    } else {
        gaussian.min(2.0 * p.b * log_term)
    };
    let psi_tau = 4.0 / 3.0 * log_term + 2.0 * (2.0 * p.expected_delay * log_term).sqrt();
    Ok(DPlus {
        d_plus: 1.0 + 2.0 * p.expected_delay + d_tau + psi_tau,
        d_tau,
        psi_tau,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretBoundParams {
    pub horizon: usize,
    pub arms: usize,
    pub lambda: f64,
    pub nu: f64,
    pub delta: f64,
    pub s: f64,
    pub radius: RadiusForm,
    pub d_tilde: f64,
    pub d_plus: f64,
    pub eta: f64,
    pub width: usize,
    pub steps: usize,
    pub depth: usize,
    pub c4: f64,
}

/// High-probability regret bound of delayed NeuralUCB at horizon `T`.
pub fn regret_bound(p: &RegretBoundParams) -> Result<f64> {
    validate_delta(p.delta)?;
    if !(p.lambda > 0.0) || p.horizon == 0 || p.arms == 0 {
        return Err(Error::Config(
            "regret bound needs lambda > 0, T >= 1 and K >= 1".into(),
        ));
    }
    if !(p.d_tilde >= 0.0)
        || !(p.d_plus >= 0.0)
        || !(p.nu >= 0.0)
        || !(p.s >= 0.0)
        || !(p.c4 >= 0.0)
    {
        return Err(Error::Config(
            "regret bound inputs must be nonnegative".into(),
        ));
    }
    let t = p.horizon as f64;
    let lambda = p.lambda;
    let log_term = (1.0 + t * p.arms as f64 / lambda).ln();
    let info = 2.0 * p.d_tilde * log_term + 2.0;
    let first = (t * info).sqrt() + p.d_plus / 2.0 * info;
    let confidence = p.nu
        * (p.d_tilde * log_term + 2.0 - 2.0 * p.delta.ln())
            .max(0.0)
            .sqrt()
        + 2.0 * p.radius.radius(lambda, p.s);
    let contraction = (1.0 - p.eta * p.width as f64 * lambda)
        .abs()
        .powf(p.steps as f64 / 2.0);
    let optimization =
        2.0 * (lambda + p.c4 * t * p.depth as f64) * contraction * (t / lambda).sqrt();
    Ok(first * (2.0 * confidence + optimization) + 1.0)
}
