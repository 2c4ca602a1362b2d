//! Session records, their JSON persistence and the per-session state machine.
//!
//! Every mutation is computed on a copy of the record, written to
//! `<id>.json.tmp`, synced and renamed over `<id>.json`; only then is the
//! in-memory record replaced. A process that dies at any point leaves either
//! the old or the new document on disk.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use crashpbo::{seed, Error as CoreError, KernelConfig, NoiseConfig, OptimizerConfig, OptimizerState};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::api::{
    CreateSessionRequest, DuelView, FeedbackRequest, FeedbackResponse, HistoryItem, HistoryView, Outcome,
    SessionStatus, SessionView, API_SCHEMA_VERSION,
};
use crate::error::{ErrorCode, Result, ServiceError};
use crate::labels::{self, ParameterLabel};

pub const RECORD_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub schema_version: u32,
    pub id: String,
    pub created_at: String,
    pub labels: Vec<ParameterLabel>,
    pub state: OptimizerState,
}

/// Stages of a persistence write at which a test hook can abort the write,
/// as if the process had been killed there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultPoint {
    BeforeWrite,
    /// The temporary file is complete but has not been renamed.
    BeforeRename,
}

/// Returns `true` to abort the write of session `id` at the given point.
pub type FaultHook = Arc<dyn Fn(FaultPoint, &str) -> bool + Send + Sync>;

pub struct SessionStore {
    dir: PathBuf,
    sessions: RwLock<HashMap<String, Arc<Mutex<SessionRecord>>>>,
    fault: RwLock<Option<FaultHook>>,
}

fn lock<T>(m: &Mutex<T>) -> Result<MutexGuard<'_, T>> {
    m.lock().map_err(|_| ServiceError::new(ErrorCode::Internal, "session lock poisoned"))
}

fn io_error(path: &Path, e: std::io::Error) -> ServiceError {
    ServiceError::new(ErrorCode::Persistence, format!("{}: {e}", path.display()))
}

/// Stable token for the pending duel of a session at a given iteration.
pub fn duel_token(id: &str, iteration: usize, x_a: &[f64], x_b: &[f64]) -> String {
    let mut h = Sha256::new();
    h.update(id.as_bytes());
    h.update((iteration as u64).to_le_bytes());
    for v in x_a.iter().chain(x_b) {
        h.update(v.to_bits().to_le_bytes());
    }
    hex::encode(&h.finalize()[..16])
}

fn status(state: &OptimizerState) -> SessionStatus {
    if state.is_finished() {
        SessionStatus::Finished
    } else if state.pending().is_some() {
        SessionStatus::AwaitingFeedback
    } else {
        SessionStatus::ReadyToPropose
    }
}

/// Proposes the next duel, falling back to a seeded random duel when the
/// model cannot be fitted.
fn propose(state: &mut OptimizerState) -> Result<()> {
    match state.propose() {
        Ok(_) => Ok(()),
        Err(CoreError::Numerical(_) | CoreError::FitNonConvergence { .. }) => {
            tracing::warn!(iteration = state.iteration(), "model fit failed; proposing a random duel");
            let mut rng = seed::rng(state.config().seed, &[state.iteration() as u64, 0x5eed]);
            state.propose_random(&mut rng)?;
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

impl SessionRecord {
    fn native(&self, x: &[f64]) -> Vec<f64> {
        labels::to_native(&self.labels, x)
    }

    fn incumbent(&self) -> Option<Vec<f64>> {
        let x = match self.state.pending_incumbent() {
            Some(x) => x.clone(),
            None => self.state.incumbent().ok()?,
        };
        Some(self.native(&x))
    }

    fn duel_view(&self) -> Option<DuelView> {
        let p = self.state.pending()?;
        Some(DuelView {
            duel_token: duel_token(&self.id, self.state.iteration(), &p.x_a, &p.x_b),
            iteration: self.state.iteration() + 1,
            x_a: self.native(&p.x_a),
            x_b: self.native(&p.x_b),
            incumbent: self.incumbent(),
        })
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            schema_version: API_SCHEMA_VERSION,
            id: self.id.clone(),
            created_at: self.created_at.clone(),
            status: status(&self.state),
            iteration: self.state.iteration(),
            budget: self.state.config().budget,
            mode: self.state.config().mode,
            labels: self.labels.clone(),
            duel: self.duel_view(),
            incumbent: self.incumbent(),
        }
    }

    pub fn history(&self) -> HistoryView {
        let s = &self.state;
        let initial = HistoryItem {
            iteration: 0,
            x_a: self.native(s.initial().x_a()),
            x_b: self.native(s.initial().x_b()),
            outcome: Outcome::of(s.initial()),
            added: s.initial_added(),
            incumbent: None,
        };
        let entries = std::iter::once(initial)
            .chain(s.history().iter().map(|h| HistoryItem {
                iteration: h.iteration,
                x_a: self.native(h.feedback.x_a()),
                x_b: self.native(h.feedback.x_b()),
                outcome: Outcome::of(&h.feedback),
                added: h.added,
                incumbent: h.incumbent.as_ref().map(|x| self.native(x)),
            }))
            .collect();
        HistoryView {
            schema_version: API_SCHEMA_VERSION,
            id: self.id.clone(),
            status: status(s),
            dataset_size: s.dataset().len(),
            crashed: s.ledger().crashed().iter().map(|x| self.native(x)).collect(),
            entries,
        }
    }
}

fn build_config(req: &CreateSessionRequest) -> Result<OptimizerConfig> {
    let c = &req.config;
    let mut config = OptimizerConfig::new(c.dim, c.budget, c.mode);
    let defaults = config.kernel.clone();
    config.kernel = KernelConfig::isotropic(
        c.lengthscale.unwrap_or(defaults.lengthscales[0]),
        c.signal_variance.unwrap_or(defaults.signal_variance),
    );
    if let Some(sigma) = c.noise_sigma {
        config.noise = NoiseConfig { sigma };
    }
    if let Some(a) = c.acquisition {
        config.acquisition = a;
    }
    config.seed = c.seed;
    if let Some(on) = c.crash_mechanism {
        config.crash_mechanism = on;
    }
    config.validate()?;
    Ok(config)
}

impl SessionStore {
    /// Opens a data directory, loading every stored session. Leftover
    /// temporary files from interrupted writes are removed.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
        let mut sessions = HashMap::new();
        for entry in fs::read_dir(&dir).map_err(|e| io_error(&dir, e))? {
            let path = entry.map_err(|e| io_error(&dir, e))?.path();
            match path.extension().and_then(|e| e.to_str()) {
                Some("tmp") => {
                    tracing::warn!(path = %path.display(), "removing interrupted write");
                    fs::remove_file(&path).map_err(|e| io_error(&path, e))?;
                }
                Some("json") => {
                    let record = load_record(&path)?;
                    sessions.insert(record.id.clone(), Arc::new(Mutex::new(record)));
                }
                _ => {}
            }
        }
        Ok(SessionStore { dir, sessions: RwLock::new(sessions), fault: RwLock::new(None) })
    }

    pub fn data_dir(&self) -> &Path {
        &self.dir
    }

    pub fn set_fault_hook(&self, hook: Option<FaultHook>) {
        if let Ok(mut f) = self.fault.write() {
            *f = hook;
        }
    }

    fn fault(&self, point: FaultPoint, id: &str) -> Result<()> {
        let hook = self.fault.read().ok().and_then(|f| f.clone());
        if hook.is_some_and(|h| h(point, id)) {
            return Err(ServiceError::new(
                ErrorCode::Persistence,
                format!("write of session {id} interrupted ({point:?})"),
            ));
        }
        Ok(())
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    fn persist(&self, record: &SessionRecord) -> Result<()> {
        self.fault(FaultPoint::BeforeWrite, &record.id)?;
        let path = self.path(&record.id);
        let tmp = self.dir.join(format!("{}.json.tmp", record.id));
        let text = serde_json::to_string_pretty(record)
            .map_err(|e| ServiceError::new(ErrorCode::Internal, e.to_string()))?;
        let mut f = fs::File::create(&tmp).map_err(|e| io_error(&tmp, e))?;
        f.write_all(text.as_bytes()).map_err(|e| io_error(&tmp, e))?;
        f.sync_all().map_err(|e| io_error(&tmp, e))?;
        drop(f);
        self.fault(FaultPoint::BeforeRename, &record.id)?;
        fs::rename(&tmp, &path).map_err(|e| io_error(&path, e))?;
        if let Ok(d) = fs::File::open(&self.dir) {
            let _ = d.sync_all();
        }
        Ok(())
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<SessionRecord>>> {
        self.sessions
            .read()
            .map_err(|_| ServiceError::new(ErrorCode::Internal, "session table poisoned"))?
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::not_found(id))
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> =
            self.sessions.read().map(|s| s.keys().cloned().collect()).unwrap_or_default();
        ids.sort();
        ids
    }

    pub fn create(&self, req: CreateSessionRequest) -> Result<SessionView> {
        let config = build_config(&req)?;
        let labels = match req.labels {
            Some(l) => l,
            None => (0..config.dim).map(ParameterLabel::unit_interval).collect(),
        };
        if labels.len() != config.dim {
            return Err(ServiceError::invalid(format!(
                "{} labels given for a {}-dimensional problem",
                labels.len(),
                config.dim
            )));
        }
        for l in &labels {
            l.validate()?;
        }
        let x_a = labels::to_unit(&labels, &req.initial.x_a)?;
        let x_b = labels::to_unit(&labels, &req.initial.x_b)?;
        let initial = req.initial.outcome.feedback(x_a, x_b)?;
        let mut state = OptimizerState::create(config, initial).map_err(|e| match e {
            CoreError::NoFeasiblePoint(_) => ServiceError::new(
                ErrorCode::AssumptionViolated,
                "both initial experiments crashed; start from a pair with at least one \
                 non-crashed experiment",
            ),
            e => e.into(),
        })?;
        propose(&mut state)?;
        let record = SessionRecord {
            schema_version: RECORD_SCHEMA_VERSION,
            id: uuid::Uuid::new_v4().simple().to_string(),
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            labels,
            state,
        };
        self.persist(&record)?;
        let view = record.view();
        self.sessions
            .write()
            .map_err(|_| ServiceError::new(ErrorCode::Internal, "session table poisoned"))?
            .insert(record.id.clone(), Arc::new(Mutex::new(record)));
        Ok(view)
    }

    pub fn view(&self, id: &str) -> Result<SessionView> {
        let s = self.session(id)?;
        let record = lock(&s)?;
        Ok(record.view())
    }

    /// The pending duel; proposes one first when none is pending. Repeated
    /// calls return the same duel and token.
    pub fn duel(&self, id: &str) -> Result<DuelView> {
        let s = self.session(id)?;
        let mut record = lock(&s)?;
        if record.state.is_finished() {
            return Err(ServiceError::new(ErrorCode::SessionFinished, "the session budget is used up"));
        }
        if record.state.pending().is_none() {
            let mut next = record.clone();
            propose(&mut next.state)?;
            self.persist(&next)?;
            *record = next;
        }
        record.duel_view().ok_or_else(|| ServiceError::new(ErrorCode::Internal, "no duel after proposing"))
    }

    pub fn submit(&self, id: &str, req: FeedbackRequest) -> Result<FeedbackResponse> {
        let s = self.session(id)?;
        let mut record = lock(&s)?;
        if record.state.is_finished() {
            return Err(ServiceError::new(ErrorCode::SessionFinished, "the session budget is used up"));
        }
        let current = record.duel_view().ok_or_else(|| {
            ServiceError::new(ErrorCode::NoPendingDuel, "no duel is pending; fetch one first")
        })?;
        if current.duel_token != req.duel_token {
            return Err(ServiceError::new(
                ErrorCode::StaleToken,
                "the duel token does not match the pending duel; reload it",
            ));
        }
        let mut next = record.clone();
        let pending = next.state.pending().cloned().expect("pending duel checked above");
        let feedback = req.outcome.feedback(pending.x_a, pending.x_b)?;
        let added = next.state.submit(feedback)?;
        if !next.state.is_finished() {
            propose(&mut next.state)?;
        }
        self.persist(&next)?;
        *record = next;
        Ok(FeedbackResponse {
            schema_version: API_SCHEMA_VERSION,
            status: status(&record.state),
            iteration: record.state.iteration(),
            added,
            incumbent: record.incumbent(),
            duel: record.duel_view(),
        })
    }

    pub fn history(&self, id: &str) -> Result<HistoryView> {
        let s = self.session(id)?;
        let record = lock(&s)?;
        Ok(record.history())
    }

    /// The optimizer's canonical state document, replayable offline.
    pub fn export(&self, id: &str) -> Result<String> {
        let s = self.session(id)?;
        let record = lock(&s)?;
        Ok(record.state.to_json()?)
    }

    /// Rewrites every session document.
    pub fn flush_all(&self) -> Result<()> {
        for id in self.ids() {
            let s = self.session(&id)?;
            let record = lock(&s)?;
            self.persist(&record)?;
        }
        Ok(())
    }
}

fn load_record(path: &Path) -> Result<SessionRecord> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let record: SessionRecord = serde_json::from_str(&text)
        .map_err(|e| ServiceError::new(ErrorCode::Persistence, format!("{}: {e}", path.display())))?;
    if record.schema_version != RECORD_SCHEMA_VERSION {
        return Err(ServiceError::new(
            ErrorCode::Persistence,
            format!(
                "{}: schema version {} (expected {RECORD_SCHEMA_VERSION})",
                path.display(),
                record.schema_version
            ),
        ));
    }
    // Re-folding the history catches documents edited by hand.
    OptimizerState::from_json(&record.state.to_json()?)
        .map_err(|e| ServiceError::new(ErrorCode::Persistence, format!("{}: {e}", path.display())))?;
    Ok(record)
}
