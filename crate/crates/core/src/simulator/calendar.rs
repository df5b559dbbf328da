//! Event-by-event reference loop over a time-ordered calendar, used to
//! produce full sample-path traces.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt::{self, Write as _};
use std::io;

use super::processes::{ArrivalSource, DecisionClock, ServiceSource};
use super::{Discipline, SimRunConfig};

/// Min-ordered event calendar. Equal times are broken by `rank`, then by
/// insertion order.
pub struct EventCalendar<E> {
    heap: BinaryHeap<Scheduled<E>>,
    seq: u64,
}

struct Scheduled<E> {
    time: f64,
    rank: u8,
    seq: u64,
    event: E,
}

impl<E> PartialEq for Scheduled<E> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<E> Eq for Scheduled<E> {}

impl<E> PartialOrd for Scheduled<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Scheduled<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap pops the maximum
        other
            .time
            .total_cmp(&self.time)
            .then(other.rank.cmp(&self.rank))
            .then(other.seq.cmp(&self.seq))
    }
}

impl<E> Default for EventCalendar<E> {
    fn default() -> Self {
        Self {
            heap: BinaryHeap::new(),
            seq: 0,
        }
    }
}

impl<E> EventCalendar<E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schedule(&mut self, time: f64, rank: u8, event: E) {
        self.heap.push(Scheduled {
            time,
            rank,
            seq: self.seq,
            event,
        });
        self.seq += 1;
    }

    pub fn pop(&mut self) -> Option<(f64, E)> {
        self.heap.pop().map(|s| (s.time, s.event))
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SimEvent {
    Arrival,
    Departure,
    Decision,
}

impl SimEvent {
    // departure, then decision, then arrival at equal timestamps
    fn rank(self) -> u8 {
        match self {
            SimEvent::Departure => 0,
            SimEvent::Decision => 1,
            SimEvent::Arrival => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceRecord {
    Arrival {
        time: f64,
        accepted: bool,
    },
    Departure {
        time: f64,
        generated: f64,
        service: f64,
    },
    /// `aud` is `None` before the first delivery.
    Decision {
        time: f64,
        aud: Option<f64>,
    },
}

impl TraceRecord {
    pub fn time(&self) -> f64 {
        match *self {
            TraceRecord::Arrival { time, .. }
            | TraceRecord::Departure { time, .. }
            | TraceRecord::Decision { time, .. } => time,
        }
    }
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TraceRecord::Arrival { time, accepted } => {
                write!(f, "arrival\t{time}\t{}", u8::from(accepted))
            }
            TraceRecord::Departure {
                time, generated, ..
            } => write!(f, "departure\t{time}\t{generated}"),
            TraceRecord::Decision { time, aud: Some(a) } => write!(f, "decision\t{time}\t{a}"),
            TraceRecord::Decision { time, aud: None } => write!(f, "decision\t{time}\t-"),
        }
    }
}

/// Ordered log of one sample path.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EventTrace {
    pub records: Vec<TraceRecord>,
    /// Lattice offset of periodic decisions, if any.
    pub phase: Option<f64>,
}

impl EventTrace {
    /// One `event_type<TAB>time<TAB>value` line per record.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = writeln!(out, "{r}");
        }
        out
    }

    pub fn write_text<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        for r in &self.records {
            writeln!(w, "{r}")?;
        }
        Ok(())
    }

    pub fn decisions(&self) -> impl Iterator<Item = (f64, Option<f64>)> + '_ {
        self.records.iter().filter_map(|r| match *r {
            TraceRecord::Decision { time, aud } => Some((time, aud)),
            _ => None,
        })
    }

    pub fn departures(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.records.iter().filter_map(|r| match *r {
            TraceRecord::Departure {
                time,
                generated,
                service,
            } => Some((time, generated, service)),
            _ => None,
        })
    }
}

pub(crate) fn run_trace(config: &SimRunConfig, max_events: usize, replication: u64) -> EventTrace {
    let spec = &config.spec;
    let mut arrivals = ArrivalSource::new(spec.arrival, config.seed, replication);
    let mut service = ServiceSource::new(spec.service.clone(), config.seed, replication);
    let mut clock = DecisionClock::new(spec.decision, config.seed, replication);

    let mut calendar = EventCalendar::new();
    calendar.schedule(arrivals.pop(), SimEvent::Arrival.rank(), SimEvent::Arrival);
    calendar.schedule(clock.pop(), SimEvent::Decision.rank(), SimEvent::Decision);

    // (generation time, service time) of the update in service
    let mut in_service: Option<(f64, f64)> = None;
    let mut waiting: VecDeque<f64> = VecDeque::new();
    let mut freshest: Option<f64> = None;
    let mut records = Vec::with_capacity(max_events);

    while records.len() < max_events {
        let Some((now, event)) = calendar.pop() else {
            break;
        };
        match event {
            SimEvent::Arrival => {
                calendar.schedule(arrivals.pop(), SimEvent::Arrival.rank(), SimEvent::Arrival);
                let accepted = match (in_service, spec.discipline) {
                    (None, _) => {
                        let s = service.draw();
                        in_service = Some((now, s));
                        calendar.schedule(now + s, SimEvent::Departure.rank(), SimEvent::Departure);
                        true
                    }
                    (Some(_), Discipline::Blocking1) => false,
                    (Some(_), Discipline::FcfsInfinite) => {
                        waiting.push_back(now);
                        true
                    }
                };
                records.push(TraceRecord::Arrival {
                    time: now,
                    accepted,
                });
            }
            SimEvent::Departure => {
                let (generated, s) = in_service.take().expect("departure without service");
                freshest = Some(generated);
                records.push(TraceRecord::Departure {
                    time: now,
                    generated,
                    service: s,
                });
                if let Some(next) = waiting.pop_front() {
                    let s = service.draw();
                    in_service = Some((next, s));
                    calendar.schedule(now + s, SimEvent::Departure.rank(), SimEvent::Departure);
                }
            }
            SimEvent::Decision => {
                calendar.schedule(clock.pop(), SimEvent::Decision.rank(), SimEvent::Decision);
                records.push(TraceRecord::Decision {
                    time: now,
                    aud: freshest.map(|g| now - g),
                });
            }
        }
    }

    EventTrace {
        records,
        phase: clock.phase(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calendar_orders_by_time_then_rank_then_insertion() {
        let mut cal = EventCalendar::new();
        cal.schedule(2.0, 2, "arrival@2");
        cal.schedule(1.0, 1, "decision@1");
        cal.schedule(2.0, 0, "departure@2");
        cal.schedule(2.0, 1, "decision@2a");
        cal.schedule(2.0, 1, "decision@2b");
        let order: Vec<_> = std::iter::from_fn(|| cal.pop().map(|(_, e)| e)).collect();
        assert_eq!(
            order,
            [
                "decision@1",
                "departure@2",
                "decision@2a",
                "decision@2b",
                "arrival@2"
            ]
        );
        assert!(cal.is_empty());
    }

    #[test]
    fn text_format() {
        let trace = EventTrace {
            records: vec![
                TraceRecord::Arrival {
                    time: 0.5,
                    accepted: true,
                },
                TraceRecord::Decision {
                    time: 1.0,
                    aud: None,
                },
                TraceRecord::Departure {
                    time: 1.5,
                    generated: 0.5,
                    service: 1.0,
                },
                TraceRecord::Decision {
                    time: 2.0,
                    aud: Some(1.5),
                },
            ],
            phase: Some(0.0),
        };
        assert_eq!(
            trace.to_text(),
            "arrival\t0.5\t1\ndecision\t1\t-\ndeparture\t1.5\t0.5\ndecision\t2\t1.5\n"
        );
    }
}
