//! Benchmark protocol: every (problem, algorithm, mode, repetition) cell runs
//! an independent optimization against the simulated decision maker.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oracle::{observe, simulate_dm};
use super::problem::{GridConfig, ProblemSpec, TestProblem};
use crate::acquisition::{AcquisitionConfig, ComparisonMode, IncumbentRule};
use crate::error::{Error, Result};
use crate::gp::{KernelConfig, NoiseConfig};
use crate::optimizer::{OptimizerConfig, OptimizerState};
use crate::{seed, Point};

pub const RESULT_SCHEMA_VERSION: u32 = 1;

/// Initial-duel draws allowed before giving up on finding a feasible point.
const MAX_INITIAL_DRAWS: usize = 10_000;

const STREAM_INITIAL: u64 = 1;
const STREAM_DM: u64 = 2;
const STREAM_OPTIMIZER: u64 = 3;
const STREAM_FALLBACK: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Preference BO with virtual comparisons for crashes.
    CrashPbo,
    /// Preference BO that never hears about crashes.
    Eubo,
    /// Uniform samples; the best non-crashed noisy observation is recommended.
    RandomSearch,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::CrashPbo => "crash_pbo",
            Algorithm::Eubo => "eubo",
            Algorithm::RandomSearch => "random_search",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::CrashPbo => "CrashPBO",
            Algorithm::Eubo => "EUBO",
            Algorithm::RandomSearch => "Random",
        }
    }

    fn stream(self) -> u64 {
        match self {
            Algorithm::CrashPbo => 0,
            Algorithm::Eubo => 1,
            Algorithm::RandomSearch => 2,
        }
    }
}

fn mode_stream(mode: Option<ComparisonMode>) -> u64 {
    match mode {
        None => 0,
        Some(ComparisonMode::TwoNew) => 1,
        Some(ComparisonMode::CompareToBest) => 2,
        Some(ComparisonMode::CompareToLast) => 3,
    }
}

/// Surrogate lengthscale for the named test functions, whose scale the model
/// does not know.
pub const TEST_FUNCTION_LENGTHSCALE: f64 = 0.35;
/// Latent comparison noise for the named test functions.
pub const TEST_FUNCTION_MODEL_NOISE: f64 = 0.7;

/// Surrogate settings shared by both preference algorithms. Unset values
/// resolve per problem: sample paths get the generating lengthscale and the
/// observation noise, named test functions get [`TEST_FUNCTION_LENGTHSCALE`]
/// and [`TEST_FUNCTION_MODEL_NOISE`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub lengthscale: Option<f64>,
    pub signal_variance: f64,
    pub lengthscale_search: bool,
    pub noise_sigma: Option<f64>,
    pub acquisition: AcquisitionConfig,
    pub incumbent_rule: IncumbentRule,
}

impl ModelConfig {
    pub fn resolve(&self, problem: &ProblemSpec, observation_noise: f64) -> (KernelConfig, NoiseConfig) {
        let (lengthscale, sigma) = match problem {
            ProblemSpec::GpSample { lengthscale, .. } => (*lengthscale, observation_noise),
            _ => (TEST_FUNCTION_LENGTHSCALE, TEST_FUNCTION_MODEL_NOISE),
        };
        (
            KernelConfig::isotropic(self.lengthscale.unwrap_or(lengthscale), self.signal_variance),
            NoiseConfig { sigma: self.noise_sigma.unwrap_or(sigma) },
        )
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            lengthscale: None,
            signal_variance: 1.0,
            lengthscale_search: false,
            noise_sigma: None,
            acquisition: AcquisitionConfig::default(),
            incumbent_rule: IncumbentRule::PosteriorMean,
        }
    }
}

fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::CrashPbo, Algorithm::Eubo, Algorithm::RandomSearch]
}

fn default_modes() -> Vec<ComparisonMode> {
    ComparisonMode::ALL.to_vec()
}

fn default_repetitions() -> usize {
    20
}

fn default_budget_multiplier() -> usize {
    10
}

fn default_noise_sigma() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub problems: Vec<ProblemSpec>,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_modes")]
    pub modes: Vec<ComparisonMode>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Experiments per run = multiplier × dimension.
    #[serde(default = "default_budget_multiplier")]
    pub budget_multiplier: usize,
    #[serde(default)]
    pub grid: GridConfig,
    /// Observation noise standard deviation of the simulated decision maker.
    #[serde(default = "default_noise_sigma")]
    pub noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub model: ModelConfig,
}

impl BenchmarkConfig {
    pub fn new(problems: Vec<ProblemSpec>) -> Self {
        BenchmarkConfig {
            problems,
            algorithms: default_algorithms(),
            modes: default_modes(),
            repetitions: default_repetitions(),
            budget_multiplier: default_budget_multiplier(),
            grid: GridConfig::default(),
            noise_sigma: default_noise_sigma(),
            seed: 0,
            model: ModelConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() {
            return Err(Error::input("at least one problem is required"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::input("at least one algorithm is required"));
        }
        let needs_modes = self.algorithms.iter().any(|a| *a != Algorithm::RandomSearch);
        if needs_modes && self.modes.is_empty() {
            return Err(Error::input("preference algorithms need at least one comparison mode"));
        }
        if self.repetitions == 0 {
            return Err(Error::input("repetitions must be at least 1"));
        }
        if self.budget_multiplier == 0 {
            return Err(Error::input("budget_multiplier must be at least 1"));
        }
        if self.noise_sigma.is_nan() || self.noise_sigma <= 0.0 {
            return Err(Error::input("noise_sigma must be positive"));
        }
        for p in &self.problems {
            if p.dim() == 0 {
                return Err(Error::input(format!("problem {} has dimension 0", p.name())));
            }
            if needs_modes {
                for &m in &self.modes {
                    if iterations_for(self.budget_multiplier * p.dim(), m) == 0 {
                        return Err(Error::input(format!(
                            "budget of {} experiments leaves no iteration for {} in mode {m}",
                            self.budget_multiplier * p.dim(),
                            p.name()
                        )));
                    }
                }
            }
        }
        for p in &self.problems {
            let (kernel, noise) = self.model.resolve(p, self.noise_sigma);
            kernel.validate()?;
            noise.require_positive()?;
        }
        self.model.acquisition.validate()
    }

    /// Cells in canonical order: problem, algorithm, mode, repetition.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut out = Vec::new();
        for problem in 0..self.problems.len() {
            for &algorithm in &self.algorithms {
                let modes: Vec<Option<ComparisonMode>> = if algorithm == Algorithm::RandomSearch {
                    vec![None]
                } else {
                    self.modes.iter().copied().map(Some).collect()
                };
                for mode in modes {
                    for repetition in 0..self.repetitions {
                        out.push(CellKey { problem, algorithm, mode, repetition });
                    }
                }
            }
        }
        out
    }
}

/// Iterations that fit in the experiment budget: the initial duel costs two
/// experiments, each iteration costs one per new point.
pub fn iterations_for(experiments: usize, mode: ComparisonMode) -> usize {
    experiments.saturating_sub(2) / mode.new_points_per_duel()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellKey {
    pub problem: usize,
    pub algorithm: Algorithm,
    pub mode: Option<ComparisonMode>,
    pub repetition: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub problem: String,
    pub algorithm: Algorithm,
    pub mode: Option<ComparisonMode>,
    pub repetition: usize,
    /// Normalized noiseless objective of the recommendation.
    pub performance: f64,
    pub crashes: usize,
    pub experiments: usize,
    pub iterations: usize,
    /// Proposals or recommendations that fell back to a model-free choice.
    pub failed_fits: usize,
    /// More than 10% of the model fits failed.
    pub flagged: bool,
    /// Initial duels redrawn because both points crashed.
    pub initial_rejections: usize,
    pub incumbent: Point,
    pub error: Option<String>,
    pub wall_time_ms: f64,
}

impl CellResult {
    pub fn crash_rate(&self) -> f64 {
        if self.experiments == 0 {
            0.0
        } else {
            self.crashes as f64 / self.experiments as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSummary {
    pub name: String,
    pub dim: usize,
    pub threshold: f64,
    pub f_min: f64,
    pub f_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// `None` aggregates over every problem.
    pub problem: Option<String>,
    pub algorithm: Algorithm,
    pub mode: Option<ComparisonMode>,
    pub cells: usize,
    pub failed_cells: usize,
    pub flagged_cells: usize,
    pub performance_mean: f64,
    pub performance_std: f64,
    pub crash_rate_mean: f64,
    pub crash_rate_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub schema_version: u32,
    pub config: BenchmarkConfig,
    pub problems: Vec<ProblemSummary>,
    pub cells: Vec<CellResult>,
    pub aggregates: Vec<Aggregate>,
}

impl BenchmarkResult {
    /// Copy with wall times zeroed, for run-to-run comparisons.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.cells {
            c.wall_time_ms = 0.0;
        }
        out
    }

    /// Suite-wide aggregate for one algorithm and mode.
    pub fn aggregate(&self, algorithm: Algorithm, mode: Option<ComparisonMode>) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.problem.is_none() && a.algorithm == algorithm && a.mode == mode)
    }
}

fn problem_key(name: &str) -> u64 {
    // FNV-1a
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

fn uniform_point(dim: usize, rng: &mut impl Rng) -> Point {
    (0..dim).map(|_| rng.random::<f64>()).collect()
}

/// Initial duel for one repetition, shared by every algorithm and mode: two
/// uniform points, redrawn until at least one does not crash.
pub fn initial_duel(problem: &TestProblem, master: u64, repetition: usize) -> Result<(Point, Point, usize)> {
    let mut rng = seed::rng(master, &[problem_key(&problem.name), repetition as u64, STREAM_INITIAL]);
    for rejections in 0..MAX_INITIAL_DRAWS {
        let a = uniform_point(problem.dim, &mut rng);
        let b = uniform_point(problem.dim, &mut rng);
        if problem.is_satisfied(&a)? || problem.is_satisfied(&b)? {
            return Ok((a, b, rejections));
        }
    }
    Err(Error::NoFeasiblePoint(format!(
        "no feasible initial point for {} after {MAX_INITIAL_DRAWS} draws",
        problem.name
    )))
}

struct Outcome {
    performance: f64,
    crashes: usize,
    experiments: usize,
    iterations: usize,
    failed_fits: usize,
    initial_rejections: usize,
    incumbent: Point,
}

fn run_random_search(problem: &TestProblem, config: &BenchmarkConfig, key: &CellKey) -> Result<Outcome> {
    let n = config.budget_multiplier * problem.dim;
    let mut rng = seed::rng(
        config.seed,
        &[problem_key(&problem.name), key.repetition as u64, STREAM_DM, key.algorithm.stream()],
    );
    let mut crashes = 0;
    let mut best: Option<(bool, f64, Point)> = None;
    for _ in 0..n {
        let x = uniform_point(problem.dim, &mut rng);
        let obs = observe(problem, &x, &mut rng)?;
        crashes += usize::from(!obs.satisfied);
        let better = match &best {
            None => true,
            Some((s, y, _)) => (obs.satisfied, obs.noisy) > (*s, *y),
        };
        if better {
            best = Some((obs.satisfied, obs.noisy, x));
        }
    }
    let (_, _, incumbent) = best.ok_or_else(|| Error::input("empty random-search budget"))?;
    Ok(Outcome {
        performance: problem.normalize(problem.eval(&incumbent)?),
        crashes,
        experiments: n,
        iterations: n,
        failed_fits: 0,
        initial_rejections: 0,
        incumbent,
    })
}

fn run_preference(
    problem: &TestProblem,
    config: &BenchmarkConfig,
    key: &CellKey,
    mode: ComparisonMode,
) -> Result<Outcome> {
    let report_crashes = key.algorithm == Algorithm::CrashPbo;
    let path =
        [problem_key(&problem.name), key.repetition as u64, key.algorithm.stream(), mode_stream(key.mode)];
    let stream = |s: u64| [path[0], path[1], path[2], path[3], s];
    let mut dm_rng = seed::rng(config.seed, &stream(STREAM_DM));
    let mut fallback_rng = seed::rng(config.seed, &stream(STREAM_FALLBACK));

    let iterations = iterations_for(config.budget_multiplier * problem.dim, mode);
    let (kernel, noise) = config.model.resolve(&config.problems[key.problem], config.noise_sigma);
    let opt_config = OptimizerConfig {
        dim: problem.dim,
        budget: iterations,
        mode,
        kernel,
        noise,
        acquisition: config.model.acquisition,
        seed: seed::derive(config.seed, &stream(STREAM_OPTIMIZER)),
        crash_mechanism: report_crashes,
        incumbent_rule: config.model.incumbent_rule,
        lengthscale_search: config.model.lengthscale_search,
    };

    let (x_a, x_b, initial_rejections) = initial_duel(problem, config.seed, key.repetition)?;
    let (fb, obs) = simulate_dm(problem, &x_a, &x_b, &mut dm_rng, report_crashes)?;
    let mut crashes = obs.iter().filter(|o| !o.satisfied).count();
    let mut experiments = 2;
    let mut failed_fits = 0;
    let mut state = OptimizerState::create(opt_config, fb)?;

    while !state.is_finished() {
        let (x_a, x_b) = match state.propose() {
            Ok(duel) => duel,
            Err(Error::FitNonConvergence { .. } | Error::Numerical(_)) => {
                failed_fits += 1;
                state.propose_random(&mut fallback_rng)?
            }
            Err(e) => return Err(e),
        };
        let (fb, obs) = simulate_dm(problem, &x_a, &x_b, &mut dm_rng, report_crashes)?;
        let new_points = mode.new_points_per_duel();
        crashes += obs[..new_points].iter().filter(|o| !o.satisfied).count();
        experiments += new_points;
        state.submit(fb)?;
    }

    let incumbent = match state.incumbent() {
        Ok(x) => x,
        Err(Error::FitNonConvergence { .. } | Error::Numerical(_)) => {
            failed_fits += 1;
            state
                .ledger()
                .feasible()
                .last()
                .cloned()
                .ok_or_else(|| Error::State("no non-crashed point to recommend".into()))?
        }
        Err(e) => return Err(e),
    };
    Ok(Outcome {
        performance: problem.normalize(problem.eval(&incumbent)?),
        crashes,
        experiments,
        iterations,
        failed_fits,
        initial_rejections,
        incumbent,
    })
}

fn run_cell(problem: &TestProblem, config: &BenchmarkConfig, key: &CellKey) -> CellResult {
    let start = Instant::now();
    let outcome = match key.mode {
        None => run_random_search(problem, config, key),
        Some(mode) => run_preference(problem, config, key, mode),
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut cell = CellResult {
        problem: problem.name.clone(),
        algorithm: key.algorithm,
        mode: key.mode,
        repetition: key.repetition,
        performance: 0.0,
        crashes: 0,
        experiments: 0,
        iterations: 0,
        failed_fits: 0,
        flagged: false,
        initial_rejections: 0,
        incumbent: Vec::new(),
        error: None,
        wall_time_ms,
    };
    match outcome {
        Ok(o) => {
            cell.flagged = o.failed_fits * 10 > o.iterations + 1;
            cell.performance = o.performance;
            cell.crashes = o.crashes;
            cell.experiments = o.experiments;
            cell.iterations = o.iterations;
            cell.failed_fits = o.failed_fits;
            cell.initial_rejections = o.initial_rejections;
            cell.incumbent = o.incumbent;
        }
        Err(e) => cell.error = Some(e.to_string()),
    }
    cell
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

fn aggregate_group(problem: Option<String>, cells: &[&CellResult]) -> Aggregate {
    let ok: Vec<&&CellResult> = cells.iter().filter(|c| c.error.is_none()).collect();
    let perf: Vec<f64> = ok.iter().map(|c| c.performance).collect();
    let rate: Vec<f64> = ok.iter().map(|c| c.crash_rate()).collect();
    let (performance_mean, performance_std) = mean_std(&perf);
    let (crash_rate_mean, crash_rate_std) = mean_std(&rate);
    Aggregate {
        problem,
        algorithm: cells[0].algorithm,
        mode: cells[0].mode,
        cells: ok.len(),
        failed_cells: cells.len() - ok.len(),
        flagged_cells: ok.iter().filter(|c| c.flagged).count(),
        performance_mean,
        performance_std,
        crash_rate_mean,
        crash_rate_std,
    }
}

/// Suite-wide aggregates per (algorithm, mode), then per-problem ones, in
/// order of first appearance. Performance is normalized per problem before
/// averaging.
pub fn aggregate(cells: &[CellResult]) -> Vec<Aggregate> {
    let mut groups: Vec<(Algorithm, Option<ComparisonMode>)> = Vec::new();
    let mut problems: Vec<&str> = Vec::new();
    for c in cells {
        if !groups.contains(&(c.algorithm, c.mode)) {
            groups.push((c.algorithm, c.mode));
        }
        if !problems.contains(&c.problem.as_str()) {
            problems.push(&c.problem);
        }
    }
    let mut out = Vec::new();
    for &(algorithm, mode) in &groups {
        let members: Vec<&CellResult> =
            cells.iter().filter(|c| c.algorithm == algorithm && c.mode == mode).collect();
        out.push(aggregate_group(None, &members));
    }
    for &p in &problems {
        for &(algorithm, mode) in &groups {
            let members: Vec<&CellResult> = cells
                .iter()
                .filter(|c| c.problem == p && c.algorithm == algorithm && c.mode == mode)
                .collect();
            if !members.is_empty() {
                out.push(aggregate_group(Some(p.to_string()), &members));
            }
        }
    }
    out
}

/// Runs every cell on the current rayon pool. Results are in canonical cell
/// order regardless of scheduling.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkResult> {
    config.validate()?;
    let problems: Vec<TestProblem> = config
        .problems
        .par_iter()
        .map(|spec| TestProblem::from_spec(spec, config.noise_sigma, &config.grid))
        .collect::<Result<_>>()?;
    let keys = config.cells();
    let cells: Vec<CellResult> =
        keys.par_iter().map(|key| run_cell(&problems[key.problem], config, key)).collect();
    Ok(BenchmarkResult {
        schema_version: RESULT_SCHEMA_VERSION,
        config: config.clone(),
        problems: problems
            .iter()
            .map(|p| ProblemSummary {
                name: p.name.clone(),
                dim: p.dim,
                threshold: p.threshold,
                f_min: p.f_min,
                f_max: p.f_max,
            })
            .collect(),
        aggregates: aggregate(&cells),
        cells,
    })
}
