//! Pairwise Gaussian process: SE kernel, probit comparison likelihood and
//! the Laplace-approximated posterior.

pub mod kernel;
pub mod laplace;
pub mod likelihood;

pub use kernel::{kernel_matrix, KernelConfig, JITTER};
pub use laplace::{
    fit_laplace, fit_with_lengthscale_grid, LaplaceObjective, LaplacePosterior, PairMoments,
    PredictiveDistribution, CLAMP_TOLERANCE, LENGTHSCALE_GRID, NEWTON_MAX_ITERATIONS, NEWTON_TOLERANCE,
};
pub use likelihood::{probit_preference_probability, NoiseConfig};
