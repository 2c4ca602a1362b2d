//! Approximate draws from a zero-mean GP with SE kernel via random Fourier
//! features: `f(x) = sqrt(2σ²/M) Σ_m w_m cos(ω_m·x + b_m)` with
//! `ω_m ~ N(0, I/l²)`, `b_m ~ U(0, 2π)`, `w_m ~ N(0, 1)`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_FEATURES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePathParams {
    pub dim: usize,
    pub lengthscale: f64,
    pub signal_variance: f64,
    pub features: usize,
    pub seed: u64,
}

impl SamplePathParams {
    pub fn new(dim: usize, seed: u64) -> Self {
        SamplePathParams { dim, lengthscale: 0.3, signal_variance: 1.0, features: DEFAULT_FEATURES, seed }
    }
}

#[derive(Debug, Clone)]
pub struct GpSamplePath {
    params: SamplePathParams,
    /// Row-major `features × dim`.
    frequencies: Vec<f64>,
    phases: Vec<f64>,
    weights: Vec<f64>,
    amplitude: f64,
}

impl GpSamplePath {
    pub fn new(params: SamplePathParams) -> Result<Self> {
        if params.dim == 0 || params.features == 0 {
            return Err(Error::input("sample path needs dim ≥ 1 and features ≥ 1"));
        }
        if [params.lengthscale, params.signal_variance].iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(Error::input("sample path lengthscale and variance must be positive"));
        }
        let mut rng = seed::rng(params.seed, &[params.dim as u64, params.features as u64]);
        let m = params.features;
        let frequencies =
            (0..m * params.dim).map(|_| rng.sample::<f64, _>(StandardNormal) / params.lengthscale).collect();
        let phases = (0..m).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
        let weights = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        Ok(GpSamplePath {
            amplitude: (2.0 * params.signal_variance / m as f64).sqrt(),
            params,
            frequencies,
            phases,
            weights,
        })
    }

    pub fn params(&self) -> &SamplePathParams {
        &self.params
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.params.dim;
        let sum: f64 = self
            .frequencies
            .chunks_exact(d)
            .zip(&self.phases)
            .zip(&self.weights)
            .map(|((w, &b), &a)| {
                let arg: f64 = w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() + b;
                a * arg.cos()
            })
            .sum();
        self.amplitude * sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let p = SamplePathParams::new(3, 11);
        let a = GpSamplePath::new(p).unwrap();
        let b = GpSamplePath::new(p).unwrap();
        let x = [0.1, 0.5, 0.9];
        assert_eq!(a.eval(&x), b.eval(&x));
        let c = GpSamplePath::new(SamplePathParams::new(3, 12)).unwrap();
        assert_ne!(a.eval(&x), c.eval(&x));
    }

    #[test]
    fn invalid_params() {
        assert!(GpSamplePath::new(SamplePathParams::new(0, 1)).is_err());
        let mut p = SamplePathParams::new(2, 1);
        p.lengthscale = 0.0;
        assert!(GpSamplePath::new(p).is_err());
    }
}
