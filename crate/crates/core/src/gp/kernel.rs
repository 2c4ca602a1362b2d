//! Squared-exponential covariance on the unit cube.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Relative diagonal jitter added to every training covariance matrix.
pub const JITTER: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// One entry per input dimension, or a single shared entry.
    pub lengthscales: Vec<f64>,
    pub signal_variance: f64,
}

impl KernelConfig {
    pub fn isotropic(lengthscale: f64, signal_variance: f64) -> Self {
        KernelConfig { lengthscales: vec![lengthscale], signal_variance }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengthscales.is_empty() {
            return Err(Error::input("kernel needs at least one lengthscale"));
        }
        if self.lengthscales.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::input("lengthscales must be positive and finite"));
        }
        if !(self.signal_variance.is_finite() && self.signal_variance > 0.0) {
            return Err(Error::input("signal variance must be positive and finite"));
        }
        Ok(())
    }

    /// Checks the kernel can act on `dim`-dimensional inputs.
    pub fn check_input_dim(&self, dim: usize) -> Result<()> {
        if self.lengthscales.len() != 1 {
            check_dim(self.lengthscales.len(), dim)?;
        }
        Ok(())
    }

    pub fn jitter(&self) -> f64 {
        JITTER * self.signal_variance
    }

    fn lengthscale(&self, m: usize) -> f64 {
        if self.lengthscales.len() == 1 {
            self.lengthscales[0]
        } else {
            self.lengthscales[m]
        }
    }

    /// k(x, x') without jitter. Inputs must have matching, checked dimension.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let r2: f64 = x
            .iter()
            .zip(y)
            .enumerate()
            .map(|(m, (a, b))| {
                let d = (a - b) / self.lengthscale(m);
                d * d
            })
            .sum();
        self.signal_variance * (-0.5 * r2).exp()
    }

    /// Cross-covariance `K[i][j] = k(rows[i], cols[j])`, no jitter.
    pub fn cross_matrix(&self, rows: &[Vec<f64>], cols: &[Vec<f64>]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.eval(&rows[i], &cols[j]))
    }
}

/// Training covariance Σ with the diagonal jitter applied.
pub fn kernel_matrix(points: &[Vec<f64>], config: &KernelConfig) -> Result<DMatrix<f64>> {
    config.validate()?;
    if let Some(first) = points.first() {
        config.check_input_dim(first.len())?;
        for p in points {
            check_dim(first.len(), p.len())?;
        }
    }
    let n = points.len();
    let jitter = config.jitter();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = config.signal_variance + jitter;
        for j in 0..i {
            let v = config.eval(&points[i], &points[j]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_has_variance_plus_jitter() {
        let k = kernel_matrix(&[vec![0.4, 0.1]], &KernelConfig::isotropic(0.3, 1.0)).unwrap();
        assert_eq!(k[(0, 0)], 1.0 + 1e-6);
    }

    #[test]
    fn identical_coordinates_give_full_covariance() {
        let cfg = KernelConfig::isotropic(0.3, 2.5);
        let k = kernel_matrix(&[vec![0.2], vec![0.7], vec![0.2]], &cfg).unwrap();
        assert_eq!(k[(0, 2)], 2.5);
        assert_eq!(k[(2, 0)], 2.5);
    }

    #[test]
    fn off_diagonal_matches_closed_form() {
        // exp(-0.5) evaluated independently to 20 digits: 0.60653065971263342360
        let k = kernel_matrix(&[vec![0.0], vec![0.3]], &KernelConfig::isotropic(0.3, 1.0)).unwrap();
        assert!((k[(0, 1)] - 0.606_530_659_712_633_4).abs() < 1e-15);
    }

    #[test]
    fn per_dimension_lengthscales_are_applied() {
        let cfg = KernelConfig { lengthscales: vec![0.3, 1e6], signal_variance: 1.0 };
        let v = cfg.eval(&[0.0, 0.0], &[0.3, 0.9]);
        assert!((v - (-0.5f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let cfg = KernelConfig { lengthscales: vec![0.3, 0.3], signal_variance: 1.0 };
        assert!(matches!(kernel_matrix(&[vec![0.1, 0.2, 0.3]], &cfg), Err(Error::DimensionMismatch { .. })));
        let iso = KernelConfig::isotropic(0.3, 1.0);
        assert!(kernel_matrix(&[vec![0.1], vec![0.1, 0.2]], &iso).is_err());
    }

    #[test]
    fn invalid_hyperparameters_are_rejected() {
        assert!(KernelConfig::isotropic(0.0, 1.0).validate().is_err());
        assert!(KernelConfig::isotropic(0.3, -1.0).validate().is_err());
    }
}
