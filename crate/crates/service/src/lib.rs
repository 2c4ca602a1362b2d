//! HTTP sessions for interactive preferential optimization.
//!
//! A session wraps one [`crashpbo::OptimizerState`]. The decision maker
//! fetches the pending duel, runs both experiments and posts an outcome
//! (`prefer_a`, `prefer_b`, `crash_a`, `crash_b` or `crash_both`) together
//! with the duel token it was shown. Points travel in native units given by
//! the session's parameter labels; the optimizer works on the unit cube.
//!
//! Sessions are persisted as one JSON document each and survive restarts.

pub mod api;
pub mod error;
pub mod labels;
pub mod server;
pub mod store;

pub use error::{ErrorCode, ServiceError};
pub use server::{router, serve, ServiceConfig};
pub use store::{FaultPoint, SessionRecord, SessionStore};
