//! Discrete-event simulation of the update-and-decision pipeline.
//!
//! Updates arrive as a Poisson process and are served one at a time. Under
//! [`Discipline::Blocking1`] an update arriving to a busy server is dropped;
//! under [`Discipline::FcfsInfinite`] it waits. At every decision epoch the
//! age is the time since generation of the most recently *delivered* update.
//! An update is missed when no decision falls in its inter-departure interval
//! `[t'_k, t'_{k+1})`.
//!
//! Equal timestamps resolve as departure, then decision, then arrival, so a
//! decision at a delivery instant sees the new update and an arrival at a
//! delivery instant finds the server free.
//!
//! Each process draws from its own substream of the run seed (arrivals,
//! service and decisions for replication `r` use substreams `4r`, `4r+1` and
//! `4r+2`), so the interval loop behind [`run`] and the event calendar behind
//! [`trace`] follow the same sample path.

mod calendar;
mod engine;
mod processes;
mod stats;

use std::fmt;
use std::str::FromStr;

pub use calendar::{EventCalendar, EventTrace, TraceRecord};

use crate::error::{invalid, Error, Result};
use crate::stochastic::{service_moments, ArrivalModel, DecisionModel, ServiceModel};
use stats::{ratio_estimate, Batch};

pub const DEFAULT_WARMUP: u64 = 1_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Discipline {
    /// Single server, no waiting room; arrivals to a busy server are lost.
    Blocking1,
    /// Single server, unbounded FCFS waiting room.
    FcfsInfinite,
}

impl Discipline {
    pub fn name(self) -> &'static str {
        match self {
            Discipline::Blocking1 => "blocking1",
            Discipline::FcfsInfinite => "fcfs",
        }
    }
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Discipline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "blocking1" | "blocking" => Ok(Discipline::Blocking1),
            "fcfs" | "fcfsinfinite" | "fcfs-infinite" => Ok(Discipline::FcfsInfinite),
            other => Err(invalid(
                "discipline",
                format!("unknown discipline `{other}`"),
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SystemSpec {
    pub arrival: ArrivalModel,
    pub service: ServiceModel,
    pub decision: DecisionModel,
    pub discipline: Discipline,
}

impl SystemSpec {
    /// Offered load `lambda * E[S]`.
    pub fn rho(&self) -> Result<f64> {
        let (mean, _) = service_moments(&self.service)?;
        Ok(self.arrival.lambda * mean)
    }

    /// Kendall-style label, e.g. `M/U/1/1-D` or `M/M/1-M`.
    pub fn label(&self) -> String {
        let service = self.service.kind().map_or('G', |k| k.kendall());
        let buffer = match self.discipline {
            Discipline::Blocking1 => "1/1",
            Discipline::FcfsInfinite => "1",
        };
        format!("M/{service}/{buffer}-{}", self.decision.kind().kendall())
    }

    pub fn validate(&self) -> Result<()> {
        ArrivalModel::new(self.arrival.lambda)?;
        self.service.validate()?;
        self.decision.validate()?;
        if !self.service.has_sampler() {
            return Err(Error::NoSampler);
        }
        if self.discipline == Discipline::FcfsInfinite {
            let rho = self.rho()?;
            if rho >= 1.0 {
                return Err(Error::Unstable { rho });
            }
        }
        Ok(())
    }
}

/// One run: `horizon` post-delivery decisions, the first `warmup` of which
/// are discarded.
#[derive(Clone, Debug)]
pub struct SimRunConfig {
    pub spec: SystemSpec,
    pub horizon: u64,
    pub warmup: u64,
    pub seed: u64,
}

impl SimRunConfig {
    pub fn new(spec: SystemSpec, horizon: u64, seed: u64) -> Self {
        Self {
            spec,
            horizon,
            warmup: DEFAULT_WARMUP,
            seed,
        }
    }

    pub fn with_warmup(mut self, warmup: u64) -> Self {
        self.warmup = warmup;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.warmup >= self.horizon {
            return Err(Error::HorizonTooSmall {
                horizon: self.horizon,
                warmup: self.warmup,
            });
        }
        Ok(())
    }
}

/// Empirical AuD and missing probability with batch-means standard errors.
///
/// Update counts cover successful updates whose whole inter-departure
/// interval lies inside the measurement window; `n_dropped` counts the
/// arrivals lost while those updates were in service.
#[derive(Clone, Debug, PartialEq)]
pub struct SimEstimate {
    pub avg_aud: f64,
    pub aud_stderr: f64,
    pub missing_prob: f64,
    pub pmis_stderr: f64,
    pub n_decisions: u64,
    pub n_generated: u64,
    pub n_successful: u64,
    pub n_dropped: u64,
    pub n_missed_updates: u64,
    pub drop_prob: f64,
    pub drop_stderr: f64,
    pub mean_interdeparture: f64,
    pub interdeparture_stderr: f64,
    /// Largest number of updates simultaneously in the system.
    pub max_in_system: usize,
    pub n_batches: usize,
}

impl SimEstimate {
    fn from_batches(batches: &[Batch], max_in_system: usize) -> Self {
        let pairs = |f: &dyn Fn(&Batch) -> (f64, f64)| -> Vec<(f64, f64)> {
            batches.iter().map(f).collect()
        };
        let (avg_aud, aud_stderr) = ratio_estimate(&pairs(&|b| (b.aud_sum, b.decisions as f64)));
        let (missing_prob, pmis_stderr) =
            ratio_estimate(&pairs(&|b| (b.missed as f64, b.updates as f64)));
        let (drop_prob, drop_stderr) = ratio_estimate(&pairs(&|b| {
            (b.dropped as f64, (b.updates + b.dropped) as f64)
        }));
        let (mean_interdeparture, interdeparture_stderr) =
            ratio_estimate(&pairs(&|b| (b.y_sum, b.updates as f64)));
        let n_successful: u64 = batches.iter().map(|b| b.updates).sum();
        let n_dropped: u64 = batches.iter().map(|b| b.dropped).sum();
        Self {
            avg_aud,
            aud_stderr,
            missing_prob,
            pmis_stderr,
            n_decisions: batches.iter().map(|b| b.decisions).sum(),
            n_generated: n_successful + n_dropped,
            n_successful,
            n_dropped,
            n_missed_updates: batches.iter().map(|b| b.missed).sum(),
            drop_prob,
            drop_stderr,
            mean_interdeparture,
            interdeparture_stderr,
            max_in_system,
            n_batches: batches.len(),
        }
    }
}

/// Simulate one run on replication substream 0.
pub fn run(config: &SimRunConfig) -> Result<SimEstimate> {
    config.validate()?;
    let out = engine::simulate(config, 0);
    Ok(SimEstimate::from_batches(&out.batches, out.max_in_system))
}

/// Pool `n_reps` independent replications (substreams `0..n_reps` of the
/// seed). Batches from every replication are pooled, so `n_reps = 1` equals
/// [`run`].
pub fn replicate(config: &SimRunConfig, n_reps: u64) -> Result<SimEstimate> {
    config.validate()?;
    if n_reps == 0 {
        return Err(invalid("n_reps", "must be >= 1"));
    }
    let mut batches = Vec::new();
    let mut max_in_system = 0;
    for rep in 0..n_reps {
        let out = engine::simulate(config, rep);
        batches.extend(out.batches);
        max_in_system = max_in_system.max(out.max_in_system);
    }
    Ok(SimEstimate::from_batches(&batches, max_in_system))
}

/// Full event log of the first `max_events` events of replication 0.
/// Ignores `horizon` and `warmup`.
pub fn trace(config: &SimRunConfig, max_events: usize) -> Result<EventTrace> {
    config.spec.validate()?;
    Ok(calendar::run_trace(config, max_events, 0))
}
