//! Dialog sessions over HTTP.
//!
//! A session compiles a dialog spec, plans, and runs every non-question act
//! on its own. It pauses whenever the plan asks the user something, and
//! resumes when the answer arrives through [`SessionStore::advance`] or
//! `POST /api/v1/sessions/{id}/reply`.

pub mod http;
pub mod session;
pub mod wire;

pub use http::{router, serve, DEFAULT_ADDR};
pub use session::{AgentAction, Reply, ServiceConfig, ServiceError, SessionStatus, SessionStore, Snapshot, SpecSource};
