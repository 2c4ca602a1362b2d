//! Preferential Bayesian optimization from pairwise comparisons and crash
//! reports.
//!
//! A decision maker compares the outcomes of two parameter vectors and may
//! flag either outcome as a crash. Crashed points are ranked below every
//! non-crashed point through virtual comparisons, so the pairwise GP learns to
//! steer the EUBO acquisition away from crash-prone regions without a separate
//! constraint model.
//!
//! - [`gp`]: pairwise GP with probit likelihood and Laplace posterior
//! - [`acquisition`]: EUBO and its maximization for the three comparison modes
//! - [`crash`]: the crashed / non-crashed ledger and dataset augmentation
//! - [`optimizer`]: the propose / submit state machine
//! - [`bench`]: synthetic problems, simulated decision maker and benchmark runner
//!
//! ```
//! use crashpbo::acquisition::ComparisonMode;
//! use crashpbo::{DuelFeedback, OptimizerConfig, OptimizerState, Preference};
//!
//! let config = OptimizerConfig::new(1, 3, ComparisonMode::CompareToBest);
//! let first = DuelFeedback::new(vec![0.2], vec![0.6], true, true, Some(Preference::Second))?;
//! let mut state = OptimizerState::create(config, first)?;
//! while !state.is_finished() {
//!     let (x_a, x_b) = state.propose()?;
//!     // Experiments below 0.1 crash; larger values are preferred.
//!     let ok_a = x_a[0] >= 0.1;
//!     let pi = ok_a.then(|| if x_a[0] > x_b[0] { Preference::First } else { Preference::Second });
//!     state.submit(DuelFeedback::new(x_a, x_b, ok_a, true, pi)?)?;
//! }
//! assert!(state.incumbent()?[0] >= 0.1);
//! # Ok::<(), crashpbo::Error>(())
//! ```

pub mod acquisition;
pub mod bench;
pub mod crash;
pub mod dataset;
pub mod error;
pub mod gp;
pub mod normal;
pub mod optimizer;
pub mod seed;

pub use acquisition::{AcquisitionConfig, ComparisonMode, IncumbentRule};
pub use crash::{DuelFeedback, FeedbackLedger};
pub use dataset::{ComparisonDataset, Duel, IndexedDuel, Preference};
pub use error::{Error, Result};
pub use gp::{KernelConfig, LaplacePosterior, NoiseConfig, PredictiveDistribution};
pub use optimizer::{OptimizerConfig, OptimizerState};

/// A parameter vector in the unit cube `[0, 1]^d`.
pub type Point = Vec<f64>;
