//! Probit comparison likelihood and its derivatives in the latent utilities.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::IndexedDuel;
use crate::error::{Error, Result};
use crate::normal;

/// Standard deviation of the additive Gaussian noise on each compared outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub sigma: f64,
}

impl NoiseConfig {
    pub fn new(sigma: f64) -> Result<Self> {
        let n = NoiseConfig { sigma };
        n.validate()?;
        Ok(n)
    }

    /// Accepts `sigma = 0` (noiseless simulated oracles).
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::input("noise sigma must be finite and nonnegative"));
        }
        Ok(())
    }

    /// The model likelihood needs a strictly positive sigma.
    pub fn require_positive(&self) -> Result<()> {
        self.validate()?;
        if self.sigma == 0.0 {
            return Err(Error::input(
                "comparison likelihood is degenerate for sigma = 0; use a noiseless oracle instead",
            ));
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.sigma
    }
}

/// Probability that the first outcome is preferred: Φ((f_a − f_b) / (√2 σ)).
pub fn probit_preference_probability(f_a: f64, f_b: f64, noise: &NoiseConfig) -> Result<f64> {
    noise.require_positive()?;
    Ok(normal::cdf((f_a - f_b) / noise.scale()))
}

/// Signed probit argument of a duel: positive when the utilities agree with
/// the observed preference.
fn duel_z(duel: &IndexedDuel, f: &DVector<f64>, scale: f64) -> f64 {
    let (w, l) = duel.winner_loser();
    (f[w] - f[l]) / scale
}

/// Log-likelihood of all duels given latent utilities.
pub fn log_likelihood(duels: &[IndexedDuel], f: &DVector<f64>, noise: &NoiseConfig) -> f64 {
    let scale = noise.scale();
    duels.iter().map(|d| normal::log_cdf(duel_z(d, f, scale))).sum()
}

/// Gradient of the log-likelihood with respect to the latent utilities.
pub fn log_likelihood_gradient(duels: &[IndexedDuel], f: &DVector<f64>, noise: &NoiseConfig) -> DVector<f64> {
    let scale = noise.scale();
    let mut g = DVector::zeros(f.len());
    for d in duels {
        let r = normal::inverse_mills(duel_z(d, f, scale)) / scale;
        let (w, l) = d.winner_loser();
        g[w] += r;
        g[l] -= r;
    }
    g
}

/// Negative Hessian of the log-likelihood (PSD, rank at most the number of duels).
pub fn neg_hessian(duels: &[IndexedDuel], f: &DVector<f64>, noise: &NoiseConfig) -> DMatrix<f64> {
    let scale = noise.scale();
    let n = f.len();
    let mut w = DMatrix::zeros(n, n);
    for d in duels {
        let z = duel_z(d, f, scale);
        let r = normal::inverse_mills(z);
        // -d²/dz² log Φ(z) = r (z + r), always in (0, 1].
        let c = (r * (z + r)).max(0.0) / (scale * scale);
        let (a, b) = (d.a, d.b);
        w[(a, a)] += c;
        w[(b, b)] += c;
        w[(a, b)] -= c;
        w[(b, a)] -= c;
    }
    w
}
