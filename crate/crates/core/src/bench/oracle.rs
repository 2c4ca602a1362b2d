//! Simulated decision maker: noisy comparisons and noiseless crash tests.

use rand::Rng;
use rand_distr::StandardNormal;

use super::problem::TestProblem;
use crate::crash::DuelFeedback;
use crate::dataset::Preference;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub value: f64,
    pub noisy: f64,
    pub satisfied: bool,
}

pub fn observe(problem: &TestProblem, x: &[f64], rng: &mut impl Rng) -> Result<Observation> {
    let value = problem.eval(x)?;
    let eps: f64 = rng.sample(StandardNormal);
    Ok(Observation { value, noisy: value + problem.noise_sigma * eps, satisfied: value >= problem.threshold })
}

/// Feedback for one duel. With `report_crashes` the crash flags follow the
/// noiseless threshold test and the preference is withheld when a point
/// crashed; without it both points are reported non-crashed and the
/// preference always comes from the noisy values.
pub fn simulate_dm(
    problem: &TestProblem,
    x_a: &[f64],
    x_b: &[f64],
    rng: &mut impl Rng,
    report_crashes: bool,
) -> Result<(DuelFeedback, [Observation; 2])> {
    let a = observe(problem, x_a, rng)?;
    let b = observe(problem, x_b, rng)?;
    let pi = if a.noisy >= b.noisy { Preference::First } else { Preference::Second };
    let (s_a, s_b) = if report_crashes { (a.satisfied, b.satisfied) } else { (true, true) };
    let fb = DuelFeedback::new(x_a.to_vec(), x_b.to_vec(), s_a, s_b, Some(pi))?;
    Ok((fb, [a, b]))
}
