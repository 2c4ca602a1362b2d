//! The optimization loop as a propose / submit state machine.
//!
//! Each iteration fits the pairwise GP to the current dataset, proposes the
//! EUBO-maximizing duel for the configured comparison mode, waits for the
//! decision maker's feedback and folds the resulting comparisons (virtual
//! ones included) into the dataset. The same machine serves simulated
//! oracles and asynchronous human feedback.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::acquisition::{
    maximize_eubo, recommend_incumbent_with, AcquisitionConfig, ComparisonMode, IncumbentRule,
};
use crate::crash::{DuelFeedback, FeedbackLedger};
use crate::dataset::ComparisonDataset;
use crate::error::{check_dim, check_unit_point, Error, Result};
use crate::gp::{fit_laplace, fit_with_lengthscale_grid, KernelConfig, LaplacePosterior, NoiseConfig};
use crate::{seed, Point};

pub const STATE_SCHEMA_VERSION: u32 = 1;

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub dim: usize,
    /// Number of duels (loop iterations).
    pub budget: usize,
    pub mode: ComparisonMode,
    pub kernel: KernelConfig,
    pub noise: NoiseConfig,
    #[serde(default)]
    pub acquisition: AcquisitionConfig,
    #[serde(default)]
    pub seed: u64,
    /// Generate virtual comparisons for crashes. When off, a crashed point
    /// just loses its duel (plain EUBO ablation).
    #[serde(default = "default_true")]
    pub crash_mechanism: bool,
    #[serde(default)]
    pub incumbent_rule: IncumbentRule,
    /// Pick the shared lengthscale by Laplace evidence on every fit.
    #[serde(default)]
    pub lengthscale_search: bool,
}

impl OptimizerConfig {
    /// Defaults used throughout the benchmarks: shared lengthscale 0.3, unit
    /// signal variance, comparison noise σ = 0.1.
    pub fn new(dim: usize, budget: usize, mode: ComparisonMode) -> Self {
        OptimizerConfig {
            dim,
            budget,
            mode,
            kernel: KernelConfig::isotropic(0.3, 1.0),
            noise: NoiseConfig { sigma: 0.1 },
            acquisition: AcquisitionConfig::default(),
            seed: 0,
            crash_mechanism: true,
            incumbent_rule: IncumbentRule::PosteriorMean,
            lengthscale_search: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::input("dimension must be at least 1"));
        }
        if self.budget == 0 {
            return Err(Error::input("budget must be at least 1"));
        }
        self.kernel.validate()?;
        self.kernel.check_input_dim(self.dim)?;
        self.noise.require_positive()?;
        self.acquisition.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PendingDuel {
    pub x_a: Point,
    pub x_b: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    /// 1-based iteration the duel belongs to.
    pub iteration: usize,
    pub feedback: DuelFeedback,
    /// Comparisons appended to the dataset by this feedback.
    pub added: usize,
    /// Incumbent at proposal time, when a model was available.
    pub incumbent: Option<Point>,
    /// Set when the crash mechanism was disabled for this run.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub plain_comparison: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    config: OptimizerConfig,
    initial: DuelFeedback,
    initial_added: usize,
    dataset: ComparisonDataset,
    ledger: FeedbackLedger,
    pending: Option<PendingDuel>,
    pending_incumbent: Option<Point>,
    iteration: usize,
    /// Most recently evaluated new point (anchor of compare-to-last).
    last_point: Point,
    history: Vec<HistoryEntry>,
}

fn check_point(dim: usize, x: &[f64]) -> Result<()> {
    check_dim(dim, x.len())?;
    check_unit_point(x)
}

impl OptimizerState {
    /// Starts a run from the initial duel's feedback.
    pub fn create(config: OptimizerConfig, initial: DuelFeedback) -> Result<Self> {
        config.validate()?;
        check_point(config.dim, initial.x_a())?;
        check_point(config.dim, initial.x_b())?;
        let (added, ledger) = if config.crash_mechanism {
            FeedbackLedger::initialize(std::slice::from_ref(&initial))?
        } else {
            if !initial.s_a() && !initial.s_b() {
                return Err(Error::NoFeasiblePoint("every initial point crashed".into()));
            }
            let mut ledger = FeedbackLedger::default();
            let added = ledger.apply_without_virtuals(&initial)?;
            (added, ledger)
        };
        let initial_added = added.len();
        let dataset = ComparisonDataset::from_duels(added)?;
        Ok(OptimizerState {
            last_point: initial.x_b().to_vec(),
            config,
            initial,
            initial_added,
            dataset,
            ledger,
            pending: None,
            pending_incumbent: None,
            iteration: 0,
            history: Vec::new(),
        })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn initial(&self) -> &DuelFeedback {
        &self.initial
    }

    /// Comparisons produced by the initial duel.
    pub fn initial_added(&self) -> usize {
        self.initial_added
    }

    pub fn dataset(&self) -> &ComparisonDataset {
        &self.dataset
    }

    pub fn ledger(&self) -> &FeedbackLedger {
        &self.ledger
    }

    pub fn pending(&self) -> Option<&PendingDuel> {
        self.pending.as_ref()
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    pub fn last_point(&self) -> &[f64] {
        &self.last_point
    }

    pub fn is_finished(&self) -> bool {
        self.iteration >= self.config.budget
    }

    /// Incumbent cached when the pending duel was proposed.
    pub fn pending_incumbent(&self) -> Option<&Point> {
        self.pending_incumbent.as_ref()
    }

    /// Fits the pairwise GP to the current dataset.
    pub fn fit(&self) -> Result<LaplacePosterior> {
        if self.config.lengthscale_search {
            fit_with_lengthscale_grid(&self.dataset, &self.config.kernel, &self.config.noise)
        } else {
            fit_laplace(&self.dataset, &self.config.kernel, &self.config.noise)
        }
    }

    /// Current recommendation: best non-crashed point under the fitted model.
    pub fn incumbent(&self) -> Result<Point> {
        let posterior = self.fit()?;
        self.incumbent_from(&posterior)
    }

    fn incumbent_from(&self, posterior: &LaplacePosterior) -> Result<Point> {
        recommend_incumbent_with(self.config.incumbent_rule, posterior, &self.ledger, &self.dataset)
    }

    fn check_can_propose(&self) -> Result<()> {
        if self.pending.is_some() {
            return Err(Error::State("a duel is already awaiting feedback".into()));
        }
        if self.is_finished() {
            return Err(Error::State(format!("budget of {} duels is exhausted", self.config.budget)));
        }
        Ok(())
    }

    fn acquisition_config(&self) -> AcquisitionConfig {
        AcquisitionConfig {
            seed: seed::derive(self.config.seed, &[self.config.acquisition.seed, self.iteration as u64]),
            ..self.config.acquisition
        }
    }

    /// Fits the model and proposes the next duel, which becomes pending.
    pub fn propose(&mut self) -> Result<(Point, Point)> {
        self.check_can_propose()?;
        let posterior = self.fit()?;
        let incumbent = self.incumbent_from(&posterior)?;
        let anchor = match self.config.mode {
            ComparisonMode::TwoNew => None,
            ComparisonMode::CompareToBest => Some(incumbent.clone()),
            ComparisonMode::CompareToLast => Some(self.last_point.clone()),
        };
        let (x_a, x_b) =
            maximize_eubo(&posterior, self.config.mode, anchor.as_deref(), &self.acquisition_config())?;
        self.pending = Some(PendingDuel { x_a: x_a.clone(), x_b: x_b.clone() });
        self.pending_incumbent = Some(incumbent);
        Ok((x_a, x_b))
    }

    /// Proposes a uniformly random duel without fitting a model. Fallback for
    /// simulated runs when the GP fit fails; the anchor of compare-to-best is
    /// the most recent non-crashed point.
    pub fn propose_random(&mut self, rng: &mut impl Rng) -> Result<(Point, Point)> {
        self.check_can_propose()?;
        let d = self.config.dim;
        let mut draw = || -> Point { (0..d).map(|_| rng.random::<f64>()).collect() };
        let x_a = draw();
        let x_b = match self.config.mode {
            ComparisonMode::TwoNew => draw(),
            ComparisonMode::CompareToBest => self
                .ledger
                .feasible()
                .last()
                .cloned()
                .ok_or_else(|| Error::State("no non-crashed point has been evaluated".into()))?,
            ComparisonMode::CompareToLast => self.last_point.clone(),
        };
        self.pending = Some(PendingDuel { x_a: x_a.clone(), x_b: x_b.clone() });
        self.pending_incumbent = None;
        Ok((x_a, x_b))
    }

    /// Re-serves the pending duel without consuming budget.
    pub fn repeat_pending(&self) -> Result<(Point, Point)> {
        self.pending
            .as_ref()
            .map(|p| (p.x_a.clone(), p.x_b.clone()))
            .ok_or_else(|| Error::State("no duel is awaiting feedback".into()))
    }

    /// Applies feedback for the pending duel. Returns the number of comparisons
    /// added. On error the state is unchanged.
    pub fn submit(&mut self, feedback: DuelFeedback) -> Result<usize> {
        let pending =
            self.pending.as_ref().ok_or_else(|| Error::State("no duel is awaiting feedback".into()))?;
        if feedback.x_a() != pending.x_a.as_slice() || feedback.x_b() != pending.x_b.as_slice() {
            return Err(Error::input("feedback does not refer to the pending duel"));
        }
        let mut ledger = self.ledger.clone();
        let added = if self.config.crash_mechanism {
            ledger.apply(&feedback)?
        } else {
            ledger.apply_without_virtuals(&feedback)?
        };
        let mut dataset = self.dataset.clone();
        let n = added.len();
        dataset.extend(added)?;

        self.ledger = ledger;
        self.dataset = dataset;
        self.pending = None;
        self.iteration += 1;
        self.last_point = match self.config.mode {
            ComparisonMode::TwoNew => feedback.x_b().to_vec(),
            _ => feedback.x_a().to_vec(),
        };
        self.history.push(HistoryEntry {
            iteration: self.iteration,
            feedback,
            added: n,
            incumbent: self.pending_incumbent.take(),
            plain_comparison: !self.config.crash_mechanism,
        });
        Ok(n)
    }

    /// Rebuilds a state by folding recorded feedback through `create` and `submit`.
    pub fn replay(config: OptimizerConfig, initial: DuelFeedback, history: &[HistoryEntry]) -> Result<Self> {
        let mut state = OptimizerState::create(config, initial)?;
        for entry in history {
            if state.is_finished() {
                return Err(Error::State("history is longer than the budget".into()));
            }
            state.pending =
                Some(PendingDuel { x_a: entry.feedback.x_a().to_vec(), x_b: entry.feedback.x_b().to_vec() });
            state.pending_incumbent = entry.incumbent.clone();
            let added = state.submit(entry.feedback.clone())?;
            if added != entry.added || entry.iteration != state.iteration {
                return Err(Error::Consistency(format!(
                    "history entry {} records {} added comparisons, replay produced {added}",
                    entry.iteration, entry.added
                )));
            }
        }
        Ok(state)
    }

    /// Serializes to the canonical, versioned JSON document.
    pub fn to_json(&self) -> Result<String> {
        let doc = StateDocumentRef {
            schema_version: STATE_SCHEMA_VERSION,
            dataset_hash: self.dataset.content_hash(),
            state: self,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Parses a document produced by [`Self::to_json`] and checks it replays
    /// to the recorded dataset.
    pub fn from_json(json: &str) -> Result<Self> {
        let report = replay_document(json)?;
        if !report.matches {
            return Err(Error::Consistency(format!(
                "state document does not replay to its recorded dataset: {}",
                report.detail
            )));
        }
        let doc: StateDocument = serde_json::from_str(json)?;
        Ok(doc.state)
    }
}

#[derive(Serialize)]
struct StateDocumentRef<'a> {
    schema_version: u32,
    dataset_hash: String,
    state: &'a OptimizerState,
}

#[derive(Deserialize)]
struct StateDocument {
    schema_version: u32,
    dataset_hash: String,
    state: OptimizerState,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: u32,
}

/// Outcome of re-folding a recorded run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayReport {
    /// Hash stored in the document.
    pub recorded_hash: String,
    /// Hash of the dataset stored in the document.
    pub stored_dataset_hash: String,
    /// Hash of the dataset obtained by replaying the history; empty if replay failed.
    pub replayed_hash: String,
    pub matches: bool,
    pub detail: String,
}

/// Replays a state document and compares dataset hashes and ledgers.
pub fn replay_document(json: &str) -> Result<ReplayReport> {
    let probe: VersionProbe = serde_json::from_str(json)?;
    if probe.schema_version != STATE_SCHEMA_VERSION {
        return Err(Error::SchemaVersion { found: probe.schema_version, expected: STATE_SCHEMA_VERSION });
    }
    let doc: StateDocument = serde_json::from_str(json)?;
    let _ = doc.schema_version;
    let stored = doc.state.dataset.content_hash();
    let mut report = ReplayReport {
        recorded_hash: doc.dataset_hash.clone(),
        stored_dataset_hash: stored.clone(),
        replayed_hash: String::new(),
        matches: false,
        detail: String::new(),
    };
    let replayed =
        match OptimizerState::replay(doc.state.config.clone(), doc.state.initial.clone(), &doc.state.history)
        {
            Ok(s) => s,
            Err(e) => {
                report.detail = format!("replay failed: {e}");
                return Ok(report);
            }
        };
    report.replayed_hash = replayed.dataset.content_hash();
    report.detail = if report.recorded_hash != stored {
        "stored dataset does not match its recorded hash".into()
    } else if report.replayed_hash != stored {
        "replayed dataset differs from the stored dataset".into()
    } else if replayed.ledger != doc.state.ledger {
        "replayed ledger differs from the stored ledger".into()
    } else if replayed.iteration != doc.state.iteration {
        "replayed iteration count differs".into()
    } else {
        report.matches = true;
        "ok".into()
    };
    Ok(report)
}
