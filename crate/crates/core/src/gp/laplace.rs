//! Laplace approximation of the pairwise GP posterior.
//!
//! The mode is found by Newton's method in whitened coordinates `f = L a`
//! with `Σ = L Lᵀ`. In those coordinates the Hessian of the negative log
//! posterior is `B = I + Lᵀ W L`, whose eigenvalues are all ≥ 1, so every
//! solve stays well conditioned even when Σ is close to singular.
//! Prediction reuses the same factors:
//!
//! ```text
//! mean = k_*ᵀ Σ⁻¹ f̂
//! cov  = k_** − k_*ᵀ (Σ + W⁻¹)⁻¹ k_*  =  k_** − vᵀv + uᵀu
//! ```
//!
//! with `v = L⁻¹ k_*` and `u = C⁻¹ v`, `B = C Cᵀ`. This form never inverts W,
//! which is singular for comparison data.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::kernel::{kernel_matrix, KernelConfig};
use super::likelihood::{log_likelihood, log_likelihood_gradient, neg_hessian, NoiseConfig};
use crate::dataset::{ComparisonDataset, IndexedDuel};
use crate::error::{check_dim, check_unit_point, Error, Result};

pub const NEWTON_TOLERANCE: f64 = 1e-6;
pub const NEWTON_MAX_ITERATIONS: usize = 100;
const MAX_HALVINGS: usize = 20;

/// Diagonal entries of a predictive covariance below `-CLAMP_TOLERANCE` are
/// reported as a numerical error; entries in `[-CLAMP_TOLERANCE, 0)` are clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-8;

/// Shared lengthscales tried by [`fit_with_lengthscale_grid`].
pub const LENGTHSCALE_GRID: [f64; 5] = [0.1, 0.2, 0.3, 0.5, 1.0];

/// Negative log posterior of the latent utilities (up to a constant), with
/// its gradient. Exposed so the Newton solver can be checked independently.
pub struct LaplaceObjective<'a> {
    duels: &'a [IndexedDuel],
    noise: NoiseConfig,
    prior: Cholesky<f64, Dyn>,
}

impl<'a> LaplaceObjective<'a> {
    pub fn new(data: &'a ComparisonDataset, kernel: &KernelConfig, noise: &NoiseConfig) -> Result<Self> {
        noise.require_positive()?;
        let sigma = kernel_matrix(data.points(), kernel)?;
        let prior = Cholesky::new(sigma)
            .ok_or_else(|| Error::Numerical("prior covariance is singular beyond jitter".into()))?;
        Ok(LaplaceObjective { duels: data.duels(), noise: *noise, prior })
    }

    /// `−log P(D|f) + ½ fᵀ Σ⁻¹ f`
    pub fn value(&self, f: &DVector<f64>) -> f64 {
        let alpha = self.prior.solve(f);
        -log_likelihood(self.duels, f, &self.noise) + 0.5 * f.dot(&alpha)
    }

    /// `Σ⁻¹ f − ∇ log P(D|f)`
    pub fn gradient(&self, f: &DVector<f64>) -> DVector<f64> {
        self.prior.solve(f) - log_likelihood_gradient(self.duels, f, &self.noise)
    }
}

/// Gaussian approximation to the posterior over utilities at the training points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaplacePosterior {
    dim: usize,
    kernel: KernelConfig,
    noise: NoiseConfig,
    points: Vec<Vec<f64>>,
    map_utilities: DVector<f64>,
    prior_covariance: DMatrix<f64>,
    hessian_w: DMatrix<f64>,
    /// Lower Cholesky factor of Σ.
    prior_factor: DMatrix<f64>,
    /// Lower Cholesky factor of `I + Lᵀ W L`.
    whitened_factor: DMatrix<f64>,
    /// Σ⁻¹ f̂
    alpha: DVector<f64>,
    iterations: usize,
    gradient_norm: f64,
    log_evidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveDistribution {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl PredictiveDistribution {
    pub fn variance(&self, i: usize) -> f64 {
        self.covariance[(i, i)]
    }
}

/// Marginal moments of a two-point joint predictive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMoments {
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub cov_ab: f64,
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn lower_factor(m: DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    Cholesky::new(m)
        .map(|c| c.l())
        .ok_or_else(|| Error::Numerical(format!("{what} is not positive definite")))
}

/// Fits the Laplace approximation by Newton's method with backtracking.
pub fn fit_laplace(
    data: &ComparisonDataset,
    kernel: &KernelConfig,
    noise: &NoiseConfig,
) -> Result<LaplacePosterior> {
    if data.is_empty() {
        return Err(Error::input("cannot fit a pairwise GP without duels; use LaplacePosterior::prior"));
    }
    noise.require_positive()?;
    let dim = data.dim().expect("nonempty dataset has points");
    let points = data.points().to_vec();
    let duels = data.duels();
    let sigma = kernel_matrix(&points, kernel)?;
    let l = lower_factor(sigma.clone(), "prior covariance")?;
    let lt = l.transpose();
    let k = points.len();

    let neg_log_post = |a: &DVector<f64>| {
        let f = &l * a;
        -log_likelihood(duels, &f, noise) + 0.5 * a.norm_squared()
    };
    // Gradient in f-space, L⁻ᵀ (a − Lᵀ g), from the whitened gradient.
    let f_gradient = |a_grad: &DVector<f64>| -> DVector<f64> {
        lt.solve_upper_triangular(a_grad).expect("Cholesky factor has a positive diagonal")
    };

    let mut a = DVector::zeros(k);
    let mut value = neg_log_post(&a);
    let mut iterations = 0;
    loop {
        let f = &l * &a;
        let g = log_likelihood_gradient(duels, &f, noise);
        let a_grad = &a - &lt * &g;
        let gradient_norm = max_abs(&f_gradient(&a_grad));
        if gradient_norm < NEWTON_TOLERANCE {
            break;
        }
        if iterations == NEWTON_MAX_ITERATIONS {
            return Err(Error::FitNonConvergence { iterations, gradient_norm });
        }
        iterations += 1;

        let w = neg_hessian(duels, &f, noise);
        let b = DMatrix::identity(k, k) + &lt * &w * &l;
        let step = Cholesky::new(b)
            .ok_or_else(|| Error::Numerical("Newton system is not positive definite".into()))?
            .solve(&a_grad);

        let slack = 1e-14 * (1.0 + value.abs());
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let candidate = &a - &step * t;
            let v = neg_log_post(&candidate);
            if v.is_finite() && v <= value + slack {
                a = candidate;
                value = v;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::FitNonConvergence { iterations, gradient_norm });
        }
    }

    let f = &l * &a;
    let g = log_likelihood_gradient(duels, &f, noise);
    let gradient_norm = max_abs(&f_gradient(&(&a - &lt * &g)));
    let w = neg_hessian(duels, &f, noise);
    let b = DMatrix::identity(k, k) + &lt * &w * &l;
    let c = lower_factor(b, "whitened posterior precision")?;
    let alpha = f_gradient(&a);
    let log_det_b: f64 = 2.0 * c.diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let log_evidence = log_likelihood(duels, &f, noise) - 0.5 * a.norm_squared() - 0.5 * log_det_b;

    Ok(LaplacePosterior {
        dim,
        kernel: kernel.clone(),
        noise: *noise,
        points,
        map_utilities: f,
        prior_covariance: sigma,
        hessian_w: w,
        prior_factor: l,
        whitened_factor: c,
        alpha,
        iterations,
        gradient_norm,
        log_evidence,
    })
}

/// Fits once per shared lengthscale in [`LENGTHSCALE_GRID`] and keeps the fit
/// with the highest Laplace log evidence. Grid points whose fit fails are skipped.
pub fn fit_with_lengthscale_grid(
    data: &ComparisonDataset,
    kernel: &KernelConfig,
    noise: &NoiseConfig,
) -> Result<LaplacePosterior> {
    let mut best: Option<LaplacePosterior> = None;
    let mut last_err = None;
    for &ls in &LENGTHSCALE_GRID {
        let k = KernelConfig::isotropic(ls, kernel.signal_variance);
        match fit_laplace(data, &k, noise) {
            Ok(p) => {
                if best.as_ref().is_none_or(|b| p.log_evidence > b.log_evidence) {
                    best = Some(p);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.expect("grid is nonempty"))
}

impl LaplacePosterior {
    /// The GP prior itself, for the no-data case.
    pub fn prior(dim: usize, kernel: &KernelConfig, noise: &NoiseConfig) -> Result<Self> {
        kernel.validate()?;
        kernel.check_input_dim(dim)?;
        noise.validate()?;
        if dim == 0 {
            return Err(Error::input("dimension must be at least 1"));
        }
        Ok(LaplacePosterior {
            dim,
            kernel: kernel.clone(),
            noise: *noise,
            points: Vec::new(),
            map_utilities: DVector::zeros(0),
            prior_covariance: DMatrix::zeros(0, 0),
            hessian_w: DMatrix::zeros(0, 0),
            prior_factor: DMatrix::zeros(0, 0),
            whitened_factor: DMatrix::zeros(0, 0),
            alpha: DVector::zeros(0),
            iterations: 0,
            gradient_norm: 0.0,
            log_evidence: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kernel(&self) -> &KernelConfig {
        &self.kernel
    }

    pub fn noise(&self) -> &NoiseConfig {
        &self.noise
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn map_utilities(&self) -> &DVector<f64> {
        &self.map_utilities
    }

    /// MAP utility of a training point, by exact coordinate match.
    pub fn map_utility_of(&self, x: &[f64]) -> Option<f64> {
        self.points.iter().position(|p| p.as_slice() == x).map(|i| self.map_utilities[i])
    }

    pub fn prior_covariance(&self) -> &DMatrix<f64> {
        &self.prior_covariance
    }

    pub fn hessian_w(&self) -> &DMatrix<f64> {
        &self.hessian_w
    }

    /// Σ⁻¹ f̂, which equals ∇ log P(D|f̂) at the mode.
    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    /// `(Σ⁻¹ + W)⁻¹`, the approximate posterior covariance at the training points.
    pub fn posterior_covariance(&self) -> DMatrix<f64> {
        let k = self.points.len();
        if k == 0 {
            return DMatrix::zeros(0, 0);
        }
        // L B⁻¹ Lᵀ = (C⁻¹ Lᵀ)ᵀ (C⁻¹ Lᵀ)
        let m = self
            .whitened_factor
            .solve_lower_triangular(&self.prior_factor.transpose())
            .expect("Cholesky factor has a positive diagonal");
        m.transpose() * m
    }

    pub fn newton_iterations(&self) -> usize {
        self.iterations
    }

    /// f-space gradient max-norm of the negative log posterior at the mode.
    pub fn gradient_norm(&self) -> f64 {
        self.gradient_norm
    }

    /// Laplace approximation of log P(D) under the fitted hyperparameters.
    pub fn log_evidence(&self) -> f64 {
        self.log_evidence
    }

    fn check_query(&self, x: &[f64]) -> Result<()> {
        check_dim(self.dim, x.len())?;
        check_unit_point(x)
    }

    /// Joint predictive distribution of the latent utility at `queries`.
    pub fn predict(&self, queries: &[Vec<f64>]) -> Result<PredictiveDistribution> {
        for q in queries {
            self.check_query(q)?;
        }
        let mut covariance = self.kernel.cross_matrix(queries, queries);
        let mean;
        if self.points.is_empty() {
            mean = DVector::zeros(queries.len());
        } else {
            let k_star = self.kernel.cross_matrix(&self.points, queries);
            mean = k_star.tr_mul(&self.alpha);
            let v = self
                .prior_factor
                .solve_lower_triangular(&k_star)
                .expect("Cholesky factor has a positive diagonal");
            let u = self
                .whitened_factor
                .solve_lower_triangular(&v)
                .expect("Cholesky factor has a positive diagonal");
            covariance -= v.tr_mul(&v);
            covariance += u.tr_mul(&u);
        }
        let n = queries.len();
        for i in 0..n {
            for j in 0..i {
                let s = 0.5 * (covariance[(i, j)] + covariance[(j, i)]);
                covariance[(i, j)] = s;
                covariance[(j, i)] = s;
            }
            let d = covariance[(i, i)];
            if d < -CLAMP_TOLERANCE {
                return Err(Error::Numerical(format!(
                    "predictive variance {d:.3e} is negative beyond tolerance"
                )));
            }
            if d < 0.0 {
                covariance[(i, i)] = 0.0;
            }
        }
        Ok(PredictiveDistribution { mean, covariance })
    }

    /// Predictive mean at a single point.
    pub fn predict_mean(&self, x: &[f64]) -> Result<f64> {
        self.check_query(x)?;
        Ok(self.points.iter().zip(self.alpha.iter()).map(|(p, a)| self.kernel.eval(p, x) * a).sum())
    }

    /// Joint moments at two points. Same algebra as [`Self::predict`], without
    /// matrix allocations beyond two work vectors; used in the acquisition loop.
    pub fn predict_pair(&self, x_a: &[f64], x_b: &[f64]) -> Result<PairMoments> {
        self.check_query(x_a)?;
        self.check_query(x_b)?;
        let sv = self.kernel.signal_variance;
        let mut m = PairMoments {
            mean_a: 0.0,
            mean_b: 0.0,
            var_a: sv,
            var_b: sv,
            cov_ab: self.kernel.eval(x_a, x_b),
        };
        let k = self.points.len();
        if k > 0 {
            let mut ka = DVector::from_fn(k, |i, _| self.kernel.eval(&self.points[i], x_a));
            let mut kb = DVector::from_fn(k, |i, _| self.kernel.eval(&self.points[i], x_b));
            m.mean_a = ka.dot(&self.alpha);
            m.mean_b = kb.dot(&self.alpha);
            self.prior_factor.solve_lower_triangular_mut(&mut ka);
            self.prior_factor.solve_lower_triangular_mut(&mut kb);
            m.var_a -= ka.norm_squared();
            m.var_b -= kb.norm_squared();
            m.cov_ab -= ka.dot(&kb);
            self.whitened_factor.solve_lower_triangular_mut(&mut ka);
            self.whitened_factor.solve_lower_triangular_mut(&mut kb);
            m.var_a += ka.norm_squared();
            m.var_b += kb.norm_squared();
            m.cov_ab += ka.dot(&kb);
        }
        for var in [&mut m.var_a, &mut m.var_b] {
            if *var < -CLAMP_TOLERANCE {
                return Err(Error::Numerical(format!(
                    "predictive variance {var:.3e} is negative beyond tolerance"
                )));
            }
            *var = var.max(0.0);
        }
        Ok(m)
    }
}
