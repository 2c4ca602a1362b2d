//! Request and response bodies of the `/v1` API.

use crashpbo::acquisition::{AcquisitionConfig, ComparisonMode};
use crashpbo::{DuelFeedback, Preference};
use serde::{Deserialize, Serialize};

use crate::labels::ParameterLabel;

pub const API_SCHEMA_VERSION: u32 = 1;

/// Decision-maker verdict on one duel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    PreferA,
    PreferB,
    CrashA,
    CrashB,
    CrashBoth,
}

impl Outcome {
    pub fn feedback(self, x_a: Vec<f64>, x_b: Vec<f64>) -> crashpbo::Result<DuelFeedback> {
        let (s_a, s_b, pi) = match self {
            Outcome::PreferA => (true, true, Some(Preference::First)),
            Outcome::PreferB => (true, true, Some(Preference::Second)),
            Outcome::CrashA => (false, true, None),
            Outcome::CrashB => (true, false, None),
            Outcome::CrashBoth => (false, false, None),
        };
        DuelFeedback::new(x_a, x_b, s_a, s_b, pi)
    }

    pub fn of(fb: &DuelFeedback) -> Self {
        match (fb.s_a(), fb.s_b(), fb.pi()) {
            (false, false, _) => Outcome::CrashBoth,
            (false, true, _) => Outcome::CrashA,
            (true, false, _) => Outcome::CrashB,
            (true, true, Some(Preference::Second)) => Outcome::PreferB,
            (true, true, _) => Outcome::PreferA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    AwaitingFeedback,
    ReadyToPropose,
    Finished,
}

/// Optimizer settings accepted on session creation; omitted fields take the
/// library defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfigRequest {
    pub dim: usize,
    pub budget: usize,
    #[serde(default = "default_mode")]
    pub mode: ComparisonMode,
    #[serde(default)]
    pub lengthscale: Option<f64>,
    #[serde(default)]
    pub signal_variance: Option<f64>,
    #[serde(default)]
    pub noise_sigma: Option<f64>,
    #[serde(default)]
    pub acquisition: Option<AcquisitionConfig>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub crash_mechanism: Option<bool>,
}

fn default_mode() -> ComparisonMode {
    ComparisonMode::CompareToBest
}

/// Feedback on the initial duel, with points in native units.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDuel {
    pub x_a: Vec<f64>,
    pub x_b: Vec<f64>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSessionRequest {
    pub config: SessionConfigRequest,
    /// One per dimension; defaults to `x0, x1, ...` on `[0, 1]`.
    #[serde(default)]
    pub labels: Option<Vec<ParameterLabel>>,
    pub initial: InitialDuel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackRequest {
    pub duel_token: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuelView {
    pub duel_token: String,
    pub iteration: usize,
    /// Native units.
    pub x_a: Vec<f64>,
    pub x_b: Vec<f64>,
    pub incumbent: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub schema_version: u32,
    pub id: String,
    pub created_at: String,
    pub status: SessionStatus,
    pub iteration: usize,
    pub budget: usize,
    pub mode: ComparisonMode,
    pub labels: Vec<ParameterLabel>,
    pub duel: Option<DuelView>,
    pub incumbent: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackResponse {
    pub schema_version: u32,
    pub status: SessionStatus,
    pub iteration: usize,
    /// Comparisons this feedback added to the dataset.
    pub added: usize,
    pub incumbent: Option<Vec<f64>>,
    pub duel: Option<DuelView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryItem {
    /// 0 for the initial duel.
    pub iteration: usize,
    pub x_a: Vec<f64>,
    pub x_b: Vec<f64>,
    pub outcome: Outcome,
    pub added: usize,
    pub incumbent: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryView {
    pub schema_version: u32,
    pub id: String,
    pub status: SessionStatus,
    pub dataset_size: usize,
    pub crashed: Vec<Vec<f64>>,
    pub entries: Vec<HistoryItem>,
}
