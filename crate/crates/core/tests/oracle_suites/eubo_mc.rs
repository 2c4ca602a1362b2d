//! Closed-form EUBO against Monte Carlo estimates of `E[max(f_a, f_b)]`.

use crashpbo::acquisition::eubo_value;
use crashpbo::gp::{fit_laplace, KernelConfig, NoiseConfig, PairMoments};
use crashpbo::{seed, ComparisonDataset, Duel, LaplacePosterior, Preference};
use rand::Rng;
use rand_distr::StandardNormal;

use super::Outcome;

pub const SAMPLES: usize = 1_000_000;
pub const PAIRS: usize = 100;
pub const STANDARD_ERRORS: f64 = 3.0;

/// Ten random posteriors, 1-D to 3-D, each fitted to a handful of random duels.
pub fn random_posteriors(master: u64) -> Vec<LaplacePosterior> {
    (0..10u64)
        .map(|k| {
            let mut rng = seed::rng(master, &[k]);
            let dim = 1 + (k as usize % 3);
            let points: Vec<Vec<f64>> =
                (0..6).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
            let duels = (0..5).map(|i| {
                let pi = if rng.random::<bool>() { Preference::First } else { Preference::Second };
                Duel::new(points[i].clone(), points[i + 1].clone(), pi)
            });
            let data = ComparisonDataset::from_duels(duels).expect("distinct points");
            let kernel = KernelConfig::isotropic(rng.random_range(0.15..0.6), 1.0);
            let noise = NoiseConfig { sigma: rng.random_range(0.05..1.0) };
            fit_laplace(&data, &kernel, &noise).expect("fit")
        })
        .collect()
}

/// Sample mean and standard error of `max(f_a, f_b)`.
pub fn monte_carlo(m: &PairMoments, samples: usize, rng: &mut impl Rng) -> (f64, f64) {
    let l11 = m.var_a.max(0.0).sqrt();
    let l21 = if l11 > 0.0 { m.cov_ab / l11 } else { 0.0 };
    let l22 = (m.var_b - l21 * l21).max(0.0).sqrt();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let v = (m.mean_a + l11 * z1).max(m.mean_b + l21 * z1 + l22 * z2);
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn run() -> Outcome {
    let posteriors = random_posteriors(11);
    let mut rng = seed::rng(12, &[]);
    let mut misses = 0;
    let mut worst = 0.0f64;
    for k in 0..PAIRS {
        let post = &posteriors[k % posteriors.len()];
        let d = post.dim();
        let x_a: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let x_b: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let (closed, m) = match (eubo_value(post, &x_a, &x_b), post.predict_pair(&x_a, &x_b)) {
            (Ok(v), Ok(m)) => (v, m),
            (Err(e), _) | (_, Err(e)) => return Outcome::fail(format!("pair {k}: {e}")),
        };
        let (mc, se) = monte_carlo(&m, SAMPLES, &mut rng);
        let z = (closed - mc).abs() / se;
        worst = worst.max(z);
        if z > STANDARD_ERRORS {
            misses += 1;
        }
    }
    Outcome::new(
        misses == 0,
        format!("{PAIRS} pairs x {SAMPLES} samples, worst deviation {worst:.2} SE, {misses} beyond {STANDARD_ERRORS} SE"),
    )
}
