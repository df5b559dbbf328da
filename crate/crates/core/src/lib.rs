//! Age-upon-decisions (AuD) toolkit for bufferless update-and-decision queues.
//!
//! - [`stochastic`]: service, arrival and decision laws, and seeded streams.
//! - [`analytic`]: closed-form AuD and missing probabilities.
//! - [`simulator`]: discrete-event simulation used as an independent check.
//! - [`experiments`]: parameter sweeps, CSV output and verification.

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod simulator;
pub mod stochastic;

pub use error::{Error, Result};
