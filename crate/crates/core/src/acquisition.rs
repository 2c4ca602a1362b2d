//! Expected utility of the best option (EUBO) and its maximization.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crash::FeedbackLedger;
use crate::dataset::ComparisonDataset;
use crate::error::{check_dim, check_unit_point, Error, Result};
use crate::gp::{LaplacePosterior, PairMoments};
use crate::{normal, seed, Point};

/// Below this spread of `f(x_a) − f(x_b)` EUBO is `max(μ_a, μ_b)`.
const DEGENERATE_SPREAD: f64 = 1e-9;
const INITIAL_STEP: f64 = 0.25;
const MIN_STEP: f64 = 1e-7;

/// How the two points of the next duel are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonMode {
    /// Both points are new (EUBO with q = 2).
    TwoNew,
    /// One new point against the current incumbent.
    CompareToBest,
    /// One new point against the most recently evaluated new point.
    CompareToLast,
}

impl ComparisonMode {
    pub const ALL: [ComparisonMode; 3] =
        [ComparisonMode::CompareToBest, ComparisonMode::CompareToLast, ComparisonMode::TwoNew];

    pub fn name(self) -> &'static str {
        match self {
            ComparisonMode::TwoNew => "two_new",
            ComparisonMode::CompareToBest => "compare_to_best",
            ComparisonMode::CompareToLast => "compare_to_last",
        }
    }

    /// New experiments consumed by one duel in this mode.
    pub fn new_points_per_duel(self) -> usize {
        match self {
            ComparisonMode::TwoNew => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for ComparisonMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ComparisonMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ComparisonMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::input(format!("unknown comparison mode '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcquisitionConfig {
    /// Latin hypercube starting points for the local search.
    pub restarts: usize,
    /// Coordinate sweeps per start.
    pub local_steps: usize,
    pub seed: u64,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        AcquisitionConfig { restarts: 32, local_steps: 60, seed: 0 }
    }
}

impl AcquisitionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.local_steps == 0 {
            return Err(Error::input("restarts and local_steps must be at least 1"));
        }
        Ok(())
    }
}

/// Which evaluated point counts as "best so far".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IncumbentRule {
    /// Highest posterior predictive mean among non-crashed points.
    #[default]
    PosteriorMean,
    /// Most duels won (virtual ones included); ties fall back to the mean.
    DuelWins,
}

/// `E[max(f_a, f_b)]` for jointly Gaussian utilities with the given moments.
pub fn eubo_from_moments(m: &PairMoments) -> f64 {
    let spread = (m.var_a + m.var_b - 2.0 * m.cov_ab).max(0.0).sqrt();
    let top = m.mean_a.max(m.mean_b);
    if spread < DEGENERATE_SPREAD {
        return top;
    }
    // E[max] = max(μ) + s (φ(t) − t Φ(−t)), t = |μ_a − μ_b| / s
    let t = (m.mean_a - m.mean_b).abs() / spread;
    let loss = (normal::pdf(t) - t * normal::cdf(-t)).max(0.0);
    top + spread * loss
}

pub fn eubo_value(posterior: &LaplacePosterior, x_a: &[f64], x_b: &[f64]) -> Result<f64> {
    Ok(eubo_from_moments(&posterior.predict_pair(x_a, x_b)?))
}

struct Candidate {
    value: f64,
    x_a: Point,
    x_b: Point,
}

fn objective(posterior: &LaplacePosterior, x_a: &[f64], x_b: &[f64]) -> f64 {
    eubo_value(posterior, x_a, x_b).unwrap_or(f64::NEG_INFINITY)
}

/// `n` points in `[0, 1]^width`, one per stratum along every coordinate.
fn latin_hypercube(n: usize, width: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; width]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for j in 0..width {
        strata.shuffle(rng);
        for (p, &k) in points.iter_mut().zip(&strata) {
            p[j] = (k as f64 + rng.random::<f64>()) / n as f64;
        }
    }
    points
}

/// Coordinate pattern search on the unit cube, maximizing `eval`.
fn pattern_search(z: &mut [f64], sweeps: usize, eval: impl Fn(&[f64]) -> f64) -> f64 {
    let mut best = eval(z);
    let mut step = INITIAL_STEP;
    for _ in 0..sweeps {
        let mut improved = false;
        for j in 0..z.len() {
            for dir in [1.0, -1.0] {
                let old = z[j];
                let moved = (old + dir * step).clamp(0.0, 1.0);
                if moved == old {
                    continue;
                }
                z[j] = moved;
                let v = eval(z);
                if v > best {
                    best = v;
                    improved = true;
                    break;
                }
                z[j] = old;
            }
        }
        if !improved {
            step *= 0.5;
            if step < MIN_STEP {
                break;
            }
        }
    }
    best
}

/// Proposes the next duel by multistart pattern search on EUBO.
///
/// For the single-new-point modes the anchor is returned unchanged as `x_b`.
pub fn maximize_eubo(
    posterior: &LaplacePosterior,
    mode: ComparisonMode,
    anchor: Option<&[f64]>,
    config: &AcquisitionConfig,
) -> Result<(Point, Point)> {
    config.validate()?;
    let d = posterior.dim();
    let anchor = match mode {
        ComparisonMode::TwoNew => None,
        _ => {
            let a = anchor
                .ok_or_else(|| Error::input(format!("comparison mode {mode} requires an anchor point")))?;
            check_dim(d, a.len())?;
            check_unit_point(a)?;
            Some(a)
        }
    };
    let width = if anchor.is_some() { d } else { 2 * d };

    let mut rng = seed::rng(config.seed, &[d as u64, mode as u64]);
    let starts = latin_hypercube(config.restarts, width, &mut rng);

    let candidates: Vec<Candidate> = starts
        .into_par_iter()
        .map(|mut z| match anchor {
            Some(b) => {
                let value = pattern_search(&mut z, config.local_steps, |x| objective(posterior, x, b));
                Candidate { value, x_a: z, x_b: b.to_vec() }
            }
            None => {
                let value =
                    pattern_search(&mut z, config.local_steps, |x| objective(posterior, &x[..d], &x[d..]));
                let x_b = z.split_off(d);
                Candidate { value, x_a: z, x_b }
            }
        })
        .collect();

    // Highest value wins; the stable sort keeps the lowest start index among ties.
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&i, &j| candidates[j].value.total_cmp(&candidates[i].value));
    order
        .into_iter()
        .map(|i| &candidates[i])
        .find(|c| c.value.is_finite() && c.x_a != c.x_b)
        .map(|c| (c.x_a.clone(), c.x_b.clone()))
        .ok_or_else(|| Error::Numerical("no restart produced a valid duel".into()))
}

/// The non-crashed evaluated point with the highest posterior mean; ties go
/// to the earliest evaluated.
pub fn recommend_incumbent(posterior: &LaplacePosterior, ledger: &FeedbackLedger) -> Result<Point> {
    let mut best: Option<(f64, &Point)> = None;
    for x in ledger.feasible() {
        let m = posterior.predict_mean(x)?;
        if best.is_none_or(|(bm, _)| m > bm) {
            best = Some((m, x));
        }
    }
    best.map(|(_, x)| x.clone()).ok_or_else(|| Error::State("no non-crashed point has been evaluated".into()))
}

/// Incumbent under an explicit [`IncumbentRule`].
pub fn recommend_incumbent_with(
    rule: IncumbentRule,
    posterior: &LaplacePosterior,
    ledger: &FeedbackLedger,
    data: &ComparisonDataset,
) -> Result<Point> {
    match rule {
        IncumbentRule::PosteriorMean => recommend_incumbent(posterior, ledger),
        IncumbentRule::DuelWins => {
            let mut wins = vec![0usize; data.points().len()];
            for d in data.duels() {
                wins[d.winner_loser().0] += 1;
            }
            let mut best: Option<(usize, f64, &Point)> = None;
            for x in ledger.feasible() {
                let w = data.index_of(x).map_or(0, |i| wins[i]);
                let m = posterior.predict_mean(x)?;
                if best.is_none_or(|(bw, bm, _)| w > bw || (w == bw && m > bm)) {
                    best = Some((w, m, x));
                }
            }
            best.map(|(_, _, x)| x.clone())
                .ok_or_else(|| Error::State("no non-crashed point has been evaluated".into()))
        }
    }
}
