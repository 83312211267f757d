//! Regularized Gram accumulator `Z = lambda I + sum u u^T`.
//!
//! `Full` keeps the dense matrix and its inverse, updated by Sherman-Morrison
//! and refreshed from a Cholesky factorization every [`REFRESH_PERIOD`]
//! updates. `Diagonal` keeps only the diagonal, which is what makes
//! hundred-thousand-parameter networks tractable.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Number of rank-1 updates between exact re-inversions in full mode.
pub const REFRESH_PERIOD: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignMode {
    Full,
    Diagonal,
}

#[derive(Debug, Clone)]
enum Storage {
    Full {
        /// Row-major `p x p`.
        z: Vec<f64>,
        z_inv: Vec<f64>,
        logdet: f64,
    },
    Diagonal {
        diag: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct DesignMatrix {
    dim: usize,
    lambda: f64,
    updates: usize,
    storage: Storage,
}

impl DesignMatrix {
    pub fn new(dim: usize, lambda: f64, mode: DesignMode) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("design matrix dimension must be >= 1".into()));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Config(format!(
                "lambda must be finite and > 0, got {lambda}"
            )));
        }
        let storage = match mode {
            DesignMode::Full => {
                let mut z = vec![0.0; dim * dim];
                let mut z_inv = vec![0.0; dim * dim];
                for i in 0..dim {
                    z[i * dim + i] = lambda;
                    z_inv[i * dim + i] = 1.0 / lambda;
                }
                Storage::Full {
                    z,
                    z_inv,
                    logdet: 0.0,
                }
            }
            DesignMode::Diagonal => Storage::Diagonal {
                diag: vec![lambda; dim],
            },
        };
        Ok(Self {
            dim,
            lambda,
            updates: 0,
            storage,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mode(&self) -> DesignMode {
        match self.storage {
            Storage::Full { .. } => DesignMode::Full,
            Storage::Diagonal { .. } => DesignMode::Diagonal,
        }
    }

    pub fn update_count(&self) -> usize {
        self.updates
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim {
            return Err(Error::Argument(format!(
                "vector has dimension {}, design matrix has {}",
                u.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// `Z += u u^T`.
    pub fn rank1_update(&mut self, u: &[f64]) -> Result<()> {
        self.check(u)?;
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("rank-1 update vector is not finite".into()));
        }
        let p = self.dim;
        match &mut self.storage {
            Storage::Full { z, z_inv, logdet } => {
                for (i, &ui) in u.iter().enumerate() {
                    if ui == 0.0 {
                        continue;
                    }
                    for (zij, &uj) in z[i * p..(i + 1) * p].iter_mut().zip(u) {
                        *zij += ui * uj;
                    }
                }
                let w = mat_vec(z_inv, p, u);
                let denom = 1.0 + dot(u, &w);
                for (i, &wi) in w.iter().enumerate() {
                    if wi == 0.0 {
                        continue;
                    }
                    let scale = wi / denom;
                    for (zij, &wj) in z_inv[i * p..(i + 1) * p].iter_mut().zip(&w) {
                        *zij -= scale * wj;
                    }
                }
                // matrix determinant lemma
                *logdet += denom.ln();
            }
            Storage::Diagonal { diag } => {
                for (d, &ui) in diag.iter_mut().zip(u) {
                    *d += ui * ui;
                }
            }
        }
        self.updates += 1;
        if self.updates.is_multiple_of(REFRESH_PERIOD) {
            self.refresh()?;
        }
        Ok(())
    }

    /// Recomputes the inverse and log-determinant of `Z` from scratch (full
    /// mode only; a no-op for the diagonal).
    pub fn refresh(&mut self) -> Result<()> {
        let p = self.dim;
        let lambda = self.lambda;
        if let Storage::Full { z, z_inv, logdet } = &mut self.storage {
            let chol = DMatrix::from_row_slice(p, p, z)
                .cholesky()
                .ok_or_else(|| Error::Numeric("design matrix lost positive definiteness".into()))?;
            let l = chol.l_dirty();
            *logdet = (0..p).map(|i| 2.0 * l[(i, i)].ln()).sum::<f64>() - p as f64 * lambda.ln();
            let inv = chol.inverse();
            for i in 0..p {
                for j in 0..p {
                    z_inv[i * p + j] = inv[(i, j)];
                }
            }
        }
        Ok(())
    }

    /// `u^T Z^{-1} u`.
    pub fn quad_form(&self, u: &[f64]) -> Result<f64> {
        self.check(u)?;
        let q = match &self.storage {
            Storage::Full { z_inv, .. } => dot(u, &mat_vec(z_inv, self.dim, u)),
            Storage::Diagonal { diag } => u.iter().zip(diag).map(|(x, d)| x * x / d).sum(),
        };
        Ok(q.max(0.0))
    }

    /// `Z^{-1} u`.
    pub fn solve(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check(u)?;
        Ok(match &self.storage {
            Storage::Full { z_inv, .. } => mat_vec(z_inv, self.dim, u),
            Storage::Diagonal { diag } => u.iter().zip(diag).map(|(x, d)| x / d).collect(),
        })
    }

    /// `log det Z - p log lambda`.
    pub fn logdet_ratio(&self) -> f64 {
        match &self.storage {
            Storage::Full { logdet, .. } => logdet.max(0.0),
            Storage::Diagonal { diag } => diag.iter().map(|d| (d / self.lambda).ln()).sum(),
        }
    }

    /// Dense copy of `Z`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let p = self.dim;
        match &self.storage {
            Storage::Full { z, .. } => DMatrix::from_row_slice(p, p, z),
            Storage::Diagonal { diag } => {
                DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag))
            }
        }
    }

    /// Dense copy of the maintained inverse.
    pub fn inverse(&self) -> DMatrix<f64> {
        let p = self.dim;
        match &self.storage {
            Storage::Full { z_inv, .. } => DMatrix::from_row_slice(p, p, z_inv),
            Storage::Diagonal { diag } => DMatrix::from_diagonal(
                &nalgebra::DVector::from_iterator(p, diag.iter().map(|d| 1.0 / d)),
            ),
        }
    }

    /// `max |Z Z^{-1} - I|`.
    pub fn inverse_residual(&self) -> f64 {
        let prod = self.matrix() * self.inverse();
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).abs());
            }
        }
        worst
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mat_vec(a: &[f64], p: usize, x: &[f64]) -> Vec<f64> {
    a.chunks_exact(p).map(|row| dot(row, x)).collect()
}
