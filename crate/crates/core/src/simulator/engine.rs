//! Interval-driven run loop.
//!
//! Decisions never change the queue, and an arrival never changes which update
//! is freshest at the receiver, so a run can walk successful updates in
//! departure order and settle every decision inside `[t'_k, t'_{k+1})` against
//! update `k` in one step. Periodic epochs are consumed in closed form; Poisson
//! epochs one at a time.

use super::processes::{DecisionClock, DepartureSource};
use super::stats::Batch;
use super::SimRunConfig;

/// Batches per run for batch-means standard errors.
pub(crate) const BATCHES_PER_RUN: u64 = 32;

pub(crate) struct RunOutput {
    pub batches: Vec<Batch>,
    pub max_in_system: usize,
}

struct BatchCursor {
    target: u64,
    count: u64,
    index: usize,
    end: u64,
}

impl BatchCursor {
    fn new(target: u64) -> Self {
        let count = BATCHES_PER_RUN.min(target).max(1);
        let mut cursor = Self {
            target,
            count,
            index: 0,
            end: 0,
        };
        cursor.end = cursor.bound(1);
        cursor
    }

    fn bound(&self, b: u64) -> u64 {
        (b as u128 * self.target as u128 / self.count as u128) as u64
    }

    /// Decisions left in the open batch, given `measured` so far.
    fn room(&mut self, measured: u64) -> u64 {
        while measured >= self.end && (self.index as u64) + 1 < self.count {
            self.index += 1;
            self.end = self.bound(self.index as u64 + 1);
        }
        self.end - measured
    }
}

pub(crate) fn simulate(config: &SimRunConfig, replication: u64) -> RunOutput {
    let spec = &config.spec;
    let mut queue = DepartureSource::new(spec, config.seed, replication);
    let mut clock = DecisionClock::new(spec.decision, config.seed, replication);

    let target = config.horizon - config.warmup;
    let mut cursor = BatchCursor::new(target);
    let mut batches = vec![Batch::default(); cursor.count as usize];

    let mut current = queue.next_update();
    // no delivered update yet: these decisions have no age
    clock.take_before(current.departure, u64::MAX, 0.0);

    let mut warm_left = config.warmup;
    let mut measured = 0u64;
    let mut measure_start: Option<f64> = None;

    loop {
        let next = queue.next_update();
        let limit = next.departure;
        let origin = current.arrival;
        let mut in_interval = 0u64;

        if warm_left > 0 {
            let (n, _) = clock.take_before(limit, warm_left, origin);
            warm_left -= n;
            in_interval += n;
        }
        if warm_left == 0 {
            while measured < target {
                if measure_start.is_none() && clock.peek() < limit {
                    measure_start = Some(clock.peek());
                }
                let room = cursor.room(measured);
                let (n, sum) = clock.take_before(limit, room, origin);
                if n == 0 {
                    break;
                }
                let batch = &mut batches[cursor.index];
                batch.decisions += n;
                batch.aud_sum += sum;
                measured += n;
                in_interval += n;
            }
        }

        let finished = measured == target;
        let complete = !finished || clock.peek() >= limit;
        let inside = measure_start.is_some_and(|start| current.departure >= start);
        if complete && inside {
            cursor.room(measured.min(target - 1));
            let batch = &mut batches[cursor.index];
            batch.updates += 1;
            batch.dropped += current.dropped;
            batch.y_sum += limit - current.departure;
            if in_interval == 0 {
                batch.missed += 1;
            }
        }
        if finished {
            break;
        }
        current = next;
    }

    RunOutput {
        batches,
        max_in_system: queue.max_in_system,
    }
}
