//! Fixtures for the criterion benchmarks.

use crashpbo::{seed, ComparisonDataset, Duel, Preference};
use rand::Rng;

/// Smooth latent utility used to label synthetic comparisons.
pub fn latent(x: &[f64]) -> f64 {
    x.iter().enumerate().map(|(i, v)| (3.0 * v + i as f64).sin()).sum()
}

/// `duels` comparisons between uniform points in `[0, 1]^dim`, each new
/// point duelling the previous one, labelled by [`latent`].
pub fn chain_dataset(duels: usize, dim: usize, master: u64) -> ComparisonDataset {
    let mut rng = seed::rng(master, &[dim as u64]);
    let mut draw = || -> Vec<f64> { (0..dim).map(|_| rng.random::<f64>()).collect() };
    let mut prev = draw();
    let mut data = ComparisonDataset::new();
    for _ in 0..duels {
        let next = draw();
        let pi = if latent(&next) >= latent(&prev) { Preference::First } else { Preference::Second };
        data.push(Duel::new(next.clone(), prev, pi)).expect("distinct dimensions");
        prev = next;
    }
    data
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_has_one_more_point_than_duels() {
        let d = chain_dataset(10, 3, 0);
        assert_eq!(d.len(), 10);
        assert_eq!(d.points().len(), 11);
    }
}
