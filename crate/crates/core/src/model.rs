//! Fully connected ReLU reward network.
//!
//! The network computes `f(x) = sqrt(m) * W_L relu(W_{L-1} relu(... relu(W_1 x)))`
//! with `W_1: m x d`, hidden `W_l: m x m` and a `1 x m` output row. All weights
//! live in one flat parameter vector, layer by layer, each matrix row-major.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::record::BanditRecord;

/// Depth, width and input dimension of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkShape {
    depth: usize,
    width: usize,
    input_dim: usize,
}

impl NetworkShape {
    /// Any shape with `depth >= 2` and positive sizes evaluates; symmetric
    /// initialization additionally needs even `width` and `input_dim`.
    pub fn new(depth: usize, width: usize, input_dim: usize) -> Result<Self> {
        if depth < 2 {
            return Err(Error::Config(format!(
                "network depth must be >= 2, got {depth}"
            )));
        }
        if width == 0 || input_dim == 0 {
            return Err(Error::Config(format!(
                "network width and input dimension must be positive, got m={width}, d={input_dim}"
            )));
        }
        Ok(Self {
            depth,
            width,
            input_dim,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// `m*d + (L-2)*m^2 + m`.
    pub fn param_count(&self) -> usize {
        let m = self.width;
        m * self.input_dim + (self.depth - 2) * m * m + m
    }

    /// Offset and length of layer `l` (1-based) inside the flat vector.
    pub fn layer_range(&self, l: usize) -> std::ops::Range<usize> {
        assert!(l >= 1 && l <= self.depth, "layer index {l} out of range");
        let m = self.width;
        let first = m * self.input_dim;
        match l {
            1 => 0..first,
            l if l == self.depth => {
                let start = first + (self.depth - 2) * m * m;
                start..start + m
            }
            l => {
                let start = first + (l - 2) * m * m;
                start..start + m * m
            }
        }
    }

    fn sqrt_width(&self) -> f64 {
        (self.width as f64).sqrt()
    }
}

/// Flattened network parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
    shape: NetworkShape,
}

impl ParamVector {
    pub fn from_values(shape: NetworkShape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.param_count() {
            return Err(Error::Argument(format!(
                "parameter vector has length {}, shape needs {}",
                values.len(),
                shape.param_count()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("parameter {i} is not finite")));
        }
        Ok(Self { values, shape })
    }

    pub fn zeros(shape: NetworkShape) -> Self {
        Self {
            values: vec![0.0; shape.param_count()],
            shape,
        }
    }

    pub fn shape(&self) -> &NetworkShape {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn layer(&self, l: usize) -> &[f64] {
        &self.values[self.shape.layer_range(l)]
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Block-symmetric Gaussian initialization.
///
/// Every layer below the output is block diagonal with two copies of one
/// Gaussian block, and the output row is `(w, -w)`. For contexts whose two
/// halves are equal the two blocks see the same input, so `f(x; theta_0) = 0`.
/// Hidden entries are `N(0, 4/m)`, output entries `N(0, 2/m)`.
pub fn init_symmetric<R: Rng + ?Sized>(shape: NetworkShape, rng: &mut R) -> Result<ParamVector> {
    let m = shape.width;
    let d = shape.input_dim;
    if !m.is_multiple_of(2) || !d.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "symmetric initialization needs even width and input dimension, got m={m}, d={d}"
        )));
    }
    let hidden = Normal::new(0.0, (4.0 / m as f64).sqrt()).expect("valid std");
    let output = Normal::new(0.0, (2.0 / m as f64).sqrt()).expect("valid std");
    let (hm, hd) = (m / 2, d / 2);

    let mut values = vec![0.0; shape.param_count()];
    for l in 1..shape.depth {
        let cols = if l == 1 { d } else { m };
        let half_cols = if l == 1 { hd } else { hm };
        let w = &mut values[shape.layer_range(l)];
        for i in 0..hm {
            for j in 0..half_cols {
                let v = hidden.sample(rng);
                w[i * cols + j] = v;
                w[(i + hm) * cols + j + half_cols] = v;
            }
        }
    }
    let out = &mut values[shape.layer_range(shape.depth)];
    for i in 0..hm {
        let v = output.sample(rng);
        out[i] = v;
        out[i + hm] = -v;
    }
    Ok(ParamVector { values, shape })
}

#[inline]
fn relu(z: f64) -> f64 {
    if z > 0.0 {
        z
    } else {
        0.0
    }
}

#[inline]
fn relu_slope(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else {
        0.0
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_input(shape: &NetworkShape, x: &[f64]) -> Result<()> {
    if x.len() != shape.input_dim {
        return Err(Error::Argument(format!(
            "context has dimension {}, network expects {}",
            x.len(),
            shape.input_dim
        )));
    }
    Ok(())
}

/// Pre-activations of every hidden layer plus the output value.
fn forward_trace(values: &[f64], shape: &NetworkShape, x: &[f64]) -> (f64, Vec<Vec<f64>>) {
    let m = shape.width;
    let mut pre: Vec<Vec<f64>> = Vec::with_capacity(shape.depth - 1);
    let w1 = &values[shape.layer_range(1)];
    pre.push(
        w1.chunks_exact(shape.input_dim)
            .map(|row| dot(row, x))
            .collect(),
    );
    for l in 2..shape.depth {
        let act: Vec<f64> = pre[l - 2].iter().map(|&z| relu(z)).collect();
        let w = &values[shape.layer_range(l)];
        pre.push(w.chunks_exact(m).map(|row| dot(row, &act)).collect());
    }
    let last = &pre[shape.depth - 2];
    let w_out = &values[shape.layer_range(shape.depth)];
    let out = shape.sqrt_width()
        * w_out
            .iter()
            .zip(last)
            .map(|(w, &z)| w * relu(z))
            .sum::<f64>();
    (out, pre)
}

/// Adds `scale(f(x)) * grad f(x)` into `out` and returns `f(x)`.
fn accumulate_gradient(
    values: &[f64],
    shape: &NetworkShape,
    x: &[f64],
    scale: impl FnOnce(f64) -> f64,
    out: &mut [f64],
) -> f64 {
    let m = shape.width;
    let sqrt_m = shape.sqrt_width();
    let (f, pre) = forward_trace(values, shape, x);
    let scale = scale(f);
    let depth = shape.depth;

    let last = &pre[depth - 2];
    let out_range = shape.layer_range(depth);
    let w_out = &values[out_range.clone()];
    let mut delta: Vec<f64> = Vec::with_capacity(m);
    for (i, &z) in last.iter().enumerate() {
        out[out_range.start + i] += scale * sqrt_m * relu(z);
        delta.push(scale * sqrt_m * w_out[i] * relu_slope(z));
    }

    for l in (1..depth).rev() {
        let range = shape.layer_range(l);
        let w = &values[range.clone()];
        let g = &mut out[range];
        if l == 1 {
            let d = shape.input_dim;
            for (i, &di) in delta.iter().enumerate() {
                if di == 0.0 {
                    continue;
                }
                for (gij, &xj) in g[i * d..(i + 1) * d].iter_mut().zip(x) {
                    *gij += di * xj;
                }
            }
        } else {
            let below = &pre[l - 2];
            let act: Vec<f64> = below.iter().map(|&z| relu(z)).collect();
            let mut next = vec![0.0; m];
            for (i, &di) in delta.iter().enumerate() {
                if di == 0.0 {
                    continue;
                }
                let row = &w[i * m..(i + 1) * m];
                for j in 0..m {
                    g[i * m + j] += di * act[j];
                    next[j] += row[j] * di;
                }
            }
            for (n, &z) in next.iter_mut().zip(below) {
                *n *= relu_slope(z);
            }
            delta = next;
        }
    }
    f
}

pub fn forward(theta: &ParamVector, x: &[f64]) -> Result<f64> {
    check_input(&theta.shape, x)?;
    Ok(forward_trace(&theta.values, &theta.shape, x).0)
}

/// Exact gradient of [`forward`] with respect to every parameter; the ReLU
/// derivative at zero is taken as zero.
pub fn gradient(theta: &ParamVector, x: &[f64]) -> Result<ParamVector> {
    forward_gradient(theta, x).map(|(_, g)| g)
}

/// Output and gradient from a single pass.
pub fn forward_gradient(theta: &ParamVector, x: &[f64]) -> Result<(f64, ParamVector)> {
    check_input(&theta.shape, x)?;
    let mut g = vec![0.0; theta.values.len()];
    let f = accumulate_gradient(&theta.values, &theta.shape, x, |_| 1.0, &mut g);
    Ok((
        f,
        ParamVector {
            values: g,
            shape: theta.shape,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchMode {
    FullBatch,
    /// Batches are drawn uniformly with replacement each step.
    MiniBatch(usize),
}

/// Regularized gradient descent settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainSpec {
    pub lambda: f64,
    pub eta: f64,
    pub steps: usize,
    pub batch: BatchMode,
}

impl TrainSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !(self.eta > 0.0) {
            return Err(Error::Config(format!(
                "training needs lambda > 0 and eta > 0, got lambda={}, eta={}",
                self.lambda, self.eta
            )));
        }
        if self.batch == BatchMode::MiniBatch(0) {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        Ok(())
    }
}

/// `sum (f(x_s) - r_s)^2 / 2 + m*lambda*|theta - anchor|^2 / 2` over `data`.
pub fn loss(
    theta: &ParamVector,
    anchor: &ParamVector,
    data: &[BanditRecord],
    lambda: f64,
) -> Result<f64> {
    let mut fit = 0.0;
    for rec in data {
        let r = forward(theta, &rec.context)? - rec.reward;
        fit += r * r / 2.0;
    }
    let reg: f64 = theta
        .values
        .iter()
        .zip(&anchor.values)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(fit + theta.shape.width as f64 * lambda * reg / 2.0)
}

/// Runs `spec.steps` gradient steps from `theta0` with the regularizer
/// anchored at `theta0`.
pub fn train_nn<R: Rng + ?Sized>(
    theta0: &ParamVector,
    data: &[BanditRecord],
    spec: &TrainSpec,
    rng: &mut R,
) -> Result<ParamVector> {
    descend(theta0, theta0, data, spec, rng, None)
}

/// Like [`train_nn`] but starts from `start`; the regularizer stays anchored
/// at `anchor`.
pub fn train_nn_from<R: Rng + ?Sized>(
    start: &ParamVector,
    anchor: &ParamVector,
    data: &[BanditRecord],
    spec: &TrainSpec,
    rng: &mut R,
) -> Result<ParamVector> {
    if start.shape != anchor.shape {
        return Err(Error::Argument(
            "start and anchor parameters have different shapes".into(),
        ));
    }
    descend(start, anchor, data, spec, rng, None)
}

fn descend<R: Rng + ?Sized>(
    start: &ParamVector,
    anchor: &ParamVector,
    data: &[BanditRecord],
    spec: &TrainSpec,
    rng: &mut R,
    frozen: Option<&[bool]>,
) -> Result<ParamVector> {
    spec.validate()?;
    if data.is_empty() || spec.steps == 0 {
        return Ok(start.clone());
    }
    for rec in data {
        check_input(&start.shape, &rec.context)?;
    }
    let shape = start.shape;
    let reg = shape.width as f64 * spec.lambda;
    let mut theta = start.values.clone();
    let mut grad = vec![0.0; theta.len()];
    let mut batch: Vec<usize> = Vec::new();

    for step in 1..=spec.steps {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut loss = 0.0;
        let mut visit = |idx: usize, theta: &[f64], grad: &mut [f64]| {
            let rec = &data[idx];
            let f = accumulate_gradient(theta, &shape, &rec.context, |f| f - rec.reward, grad);
            loss += (f - rec.reward) * (f - rec.reward) / 2.0;
        };
        match spec.batch {
            BatchMode::FullBatch => {
                for idx in 0..data.len() {
                    visit(idx, &theta, &mut grad);
                }
            }
            BatchMode::MiniBatch(size) => {
                batch.clear();
                batch.extend((0..size).map(|_| rng.random_range(0..data.len())));
                for &idx in &batch {
                    visit(idx, &theta, &mut grad);
                }
            }
        }
        let mut reg_loss = 0.0;
        for ((g, &t), &a) in grad.iter_mut().zip(&theta).zip(&anchor.values) {
            *g += reg * (t - a);
            reg_loss += (t - a) * (t - a);
        }
        loss += reg * reg_loss / 2.0;
        if !loss.is_finite() {
            return Err(Error::DivergedTraining { step });
        }
        match frozen {
            None => theta
                .iter_mut()
                .zip(&grad)
                .for_each(|(t, g)| *t -= spec.eta * g),
            Some(mask) => theta
                .iter_mut()
                .zip(&grad)
                .zip(mask)
                .filter(|(_, &f)| !f)
                .for_each(|((t, g), _)| *t -= spec.eta * g),
        }
    }
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::DivergedTraining { step: spec.steps });
    }
    Ok(ParamVector {
        values: theta,
        shape,
    })
}
