//! After fitting, every crashed point sits below every non-crashed point.

use crashpbo::gp::{fit_laplace, KernelConfig, NoiseConfig};
use crashpbo::{seed, ComparisonDataset, DuelFeedback, FeedbackLedger, Preference};
use rand::Rng;

use super::Outcome;

pub struct Instance {
    pub data: ComparisonDataset,
    pub ledger: FeedbackLedger,
}

/// Random duels on `g(x) = Σ sin(3 x_i + φ_i)` with crashes below its
/// sampled median; preferences follow `g` exactly.
pub fn instance(k: u64) -> Instance {
    let mut rng = seed::rng(31, &[k]);
    let dim = 1 + (k as usize % 2);
    let phase: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..6.0)).collect();
    let g = |x: &[f64]| x.iter().zip(&phase).map(|(v, p)| (3.0 * v + p).sin()).sum::<f64>();
    let draw =
        |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> { (0..dim).map(|_| rng.random::<f64>()).collect() };
    let mut sample: Vec<f64> = (0..201).map(|_| g(&draw(&mut rng))).collect();
    sample.sort_by(f64::total_cmp);
    let threshold = sample[100];

    let mut data = ComparisonDataset::new();
    let mut ledger = FeedbackLedger::default();
    let mut duels = 0;
    while duels < 8 {
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let (s_a, s_b) = (g(&a) >= threshold, g(&b) >= threshold);
        if ledger.feasible().is_empty() && !(s_a || s_b) {
            continue;
        }
        let pi = if g(&a) >= g(&b) { Preference::First } else { Preference::Second };
        let fb = DuelFeedback::new(a, b, s_a, s_b, Some(pi)).expect("valid feedback");
        data.extend(ledger.apply(&fb).expect("consistent")).expect("dataset");
        duels += 1;
    }
    Instance { data, ledger }
}

/// Whether the dataset ranks every feasible point above every crashed point
/// in at least one comparison.
pub fn dense_coverage(inst: &Instance) -> bool {
    let ranked = |s: &[f64], c: &[f64]| {
        inst.data.duels().iter().any(|d| {
            let (w, l) = d.winner_loser();
            inst.data.points()[w] == s && inst.data.points()[l] == c
        })
    };
    inst.ledger.crashed().iter().all(|c| inst.ledger.feasible().iter().all(|s| ranked(s, c)))
}

pub fn run() -> Outcome {
    let kernel = KernelConfig::isotropic(0.3, 1.0);
    let noise = NoiseConfig { sigma: 0.1 };
    let mut tested = 0;
    let mut min_gap = f64::INFINITY;
    for k in 0.. {
        if tested == 10 {
            break;
        }
        let inst = instance(k);
        if inst.ledger.crashed().is_empty() {
            continue;
        }
        if !dense_coverage(&inst) {
            return Outcome::fail(format!("instance {k}: virtual coverage is not dense"));
        }
        let post = match fit_laplace(&inst.data, &kernel, &noise) {
            Ok(p) => p,
            Err(e) => return Outcome::fail(format!("instance {k}: {e}")),
        };
        let utility = |x: &Vec<f64>| post.map_utility_of(x).expect("training point");
        let top_crashed = inst.ledger.crashed().iter().map(utility).fold(f64::NEG_INFINITY, f64::max);
        let low_feasible = inst.ledger.feasible().iter().map(utility).fold(f64::INFINITY, f64::min);
        min_gap = min_gap.min(low_feasible - top_crashed);
        tested += 1;
    }
    Outcome::new(
        min_gap > 0.0,
        format!("{tested} instances, smallest gap min f(X_s) - max f(X_c) = {min_gap:.3}"),
    )
}
