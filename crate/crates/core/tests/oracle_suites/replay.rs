//! Randomized sessions exported and replayed from their history.

use crashpbo::optimizer::replay_document;
use crashpbo::{
    seed, AcquisitionConfig, ComparisonMode, DuelFeedback, OptimizerConfig, OptimizerState, Preference,
};
use rand::Rng;

use super::Outcome;

/// Runs one session against a random threshold oracle and returns the state.
pub fn random_session(k: u64) -> crashpbo::Result<OptimizerState> {
    let mut rng = seed::rng(41, &[k]);
    let dim = 1 + (k as usize % 2);
    let mode = ComparisonMode::ALL[k as usize % 3];
    let mut config = OptimizerConfig::new(dim, rng.random_range(3..7), mode);
    config.acquisition = AcquisitionConfig { restarts: 3, local_steps: 10, seed: k };
    config.seed = k;
    config.crash_mechanism = k % 5 != 4;
    let centre: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let g = move |x: &[f64]| -x.iter().zip(&centre).map(|(a, c)| (a - c).powi(2)).sum::<f64>();
    let threshold = -0.15 * dim as f64;

    let feedback = |a: Vec<f64>, b: Vec<f64>, rng: &mut rand_chacha::ChaCha8Rng| {
        let noisy = |x: &[f64], rng: &mut rand_chacha::ChaCha8Rng| g(x) + 0.05 * (rng.random::<f64>() - 0.5);
        let pi = if noisy(&a, rng) >= noisy(&b, rng) { Preference::First } else { Preference::Second };
        let (s_a, s_b) = (g(&a) >= threshold, g(&b) >= threshold);
        DuelFeedback::new(a, b, s_a, s_b, Some(pi))
    };
    // Redraw the initial duel until it holds a feasible point.
    let first = loop {
        let x_a: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let x_b: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let fb = feedback(x_a, x_b, &mut rng)?;
        if fb.s_a() || fb.s_b() {
            break fb;
        }
    };
    let mut state = OptimizerState::create(config, first)?;
    while !state.is_finished() {
        let (a, b) =
            if rng.random::<f64>() < 0.2 { state.propose_random(&mut rng)? } else { state.propose()? };
        let fb = feedback(a, b, &mut rng)?;
        state.submit(fb)?;
    }
    Ok(state)
}

pub fn run() -> Outcome {
    for k in 0..20u64 {
        let state = match random_session(k) {
            Ok(s) => s,
            Err(e) => return Outcome::fail(format!("session {k}: {e}")),
        };
        let json = match state.to_json() {
            Ok(j) => j,
            Err(e) => return Outcome::fail(format!("session {k}: export failed: {e}")),
        };
        let report = match replay_document(&json) {
            Ok(r) => r,
            Err(e) => return Outcome::fail(format!("session {k}: {e}")),
        };
        if !report.matches || report.replayed_hash != state.dataset().content_hash() {
            return Outcome::fail(format!("session {k}: {}", report.detail));
        }
        let reexported = OptimizerState::from_json(&json).and_then(|s| s.to_json());
        if reexported.ok().as_deref() != Some(json.as_str()) {
            return Outcome::fail(format!("session {k}: export -> import -> export changed bytes"));
        }
    }
    Outcome::new(true, "20 sessions replayed with identical dataset hashes")
}
