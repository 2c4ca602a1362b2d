//! Analytic gradient of the negative log posterior against central differences.

use crashpbo::gp::{KernelConfig, LaplaceObjective, NoiseConfig};
use crashpbo::{seed, ComparisonDataset, Duel, Preference};
use nalgebra::DVector;
use rand::Rng;

use super::Outcome;

pub const STEP: f64 = 1e-5;
pub const TOLERANCE: f64 = 1e-4;

/// Worst relative error over `datasets` random 5-point datasets, three
/// latent vectors each.
pub fn worst_relative_error(datasets: u64) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..datasets {
        let mut rng = seed::rng(21, &[k]);
        let dim = 1 + (k as usize % 2);
        let points: Vec<Vec<f64>> = (0..5).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
        let duels: Vec<Duel> = (0..6)
            .map(|_| {
                let a = rng.random_range(0..5);
                let b = (a + rng.random_range(1..5)) % 5;
                let pi = if rng.random::<bool>() { Preference::First } else { Preference::Second };
                Duel::new(points[a].clone(), points[b].clone(), pi)
            })
            .collect();
        let data = ComparisonDataset::from_duels(duels).expect("distinct points");
        let n = data.points().len();
        let kernel = KernelConfig::isotropic(rng.random_range(0.2..0.8), 1.0);
        let noise = NoiseConfig { sigma: rng.random_range(0.1..1.0) };
        let obj = LaplaceObjective::new(&data, &kernel, &noise).expect("objective");
        for _ in 0..3 {
            let f = DVector::from_fn(n, |_, _| rng.random_range(-1.5..1.5));
            let g = obj.gradient(&f);
            let fd = DVector::from_fn(n, |i, _| {
                let mut up = f.clone();
                let mut down = f.clone();
                up[i] += STEP;
                down[i] -= STEP;
                (obj.value(&up) - obj.value(&down)) / (2.0 * STEP)
            });
            let err = (&g - &fd).norm() / g.norm();
            worst = worst.max(err);
        }
    }
    worst
}

pub fn run() -> Outcome {
    let worst = worst_relative_error(20);
    Outcome::new(
        worst < TOLERANCE,
        format!("20 datasets, max relative error {worst:.2e} (limit {TOLERANCE:.0e})"),
    )
}
