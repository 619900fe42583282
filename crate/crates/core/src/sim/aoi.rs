//! Slotted Age-of-Information bookkeeping.

use thiserror::Error;

use super::stats::BatchMeans;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AoiError {
    #[error("delivery stamped {stamp} observed at earlier time {t}")]
    FutureStamp { t: u64, stamp: u64 },
    #[error("time went backwards from {last} to {t}")]
    NonMonotone { last: u64, t: u64 },
}

/// Integer-time clock with `ticks_per_slot` ticks per slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotClock {
    pub tick: u64,
    pub ticks_per_slot: u64,
}

impl SlotClock {
    pub fn new(ticks_per_slot: u64) -> Self {
        assert!(ticks_per_slot >= 1, "ticks_per_slot must be at least 1");
        Self { tick: 0, ticks_per_slot }
    }

    pub fn slot_time(&self) -> f64 {
        self.tick as f64 / self.ticks_per_slot as f64
    }

    pub fn slot(&self) -> u64 {
        self.tick / self.ticks_per_slot
    }
}

/// Outcome of one [`AoiTracker::step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AoiStep {
    pub before: u64,
    pub after: u64,
    /// `A(t+1) ≤ A(t)`, so `A(t)` is a peak sample.
    pub peak: bool,
}

/// Age process `A(t)` under the recursion
/// `A(t+1) = A(t) + 1` without delivery and `A(t+1) = min(t - g, A(t))`
/// on delivery of a packet stamped `g`.
///
/// `A(0) = 0`. Samples are accumulated only inside the measurement window
/// and only after the first delivery.
#[derive(Debug, Clone)]
pub struct AoiTracker {
    age: u64,
    freshest: Option<u64>,
    last_t: Option<u64>,
    first_delivery: Option<u64>,
    ages: BatchMeans,
    peaks: BatchMeans,
    trace: Option<Vec<u64>>,
}

impl AoiTracker {
    /// Measures over `[window_start, window_end)`.
    pub fn new(window_start: u64, window_end: u64) -> Self {
        Self {
            age: 0,
            freshest: None,
            last_t: None,
            first_delivery: None,
            ages: BatchMeans::new(window_start, window_end, BatchMeans::DEFAULT_BATCHES),
            peaks: BatchMeans::new(window_start, window_end, BatchMeans::DEFAULT_BATCHES),
            trace: None,
        }
    }

    /// Records `A(t)` at every step.
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    /// Starts from a given age, for unit checks of the recursion.
    pub fn with_age(mut self, age: u64) -> Self {
        self.age = age;
        self
    }

    pub fn age(&self) -> u64 {
        self.age
    }

    /// Newest stamp received so far, `U(t)`.
    pub fn freshest(&self) -> Option<u64> {
        self.freshest
    }

    pub fn step(&mut self, t: u64, delivery: Option<u64>) -> Result<AoiStep, AoiError> {
        if let Some(last) = self.last_t {
            if t < last {
                return Err(AoiError::NonMonotone { last, t });
            }
        }
        if let Some(g) = delivery {
            if g > t {
                return Err(AoiError::FutureStamp { t, stamp: g });
            }
        }
        self.last_t = Some(t);

        let before = self.age;
        let after = match delivery {
            None => before + 1,
            Some(g) => (t - g).min(before),
        };
        let peak = after <= before;

        if self.first_delivery.is_some_and(|d| t > d) {
            self.ages.add(t, before as f64);
            if peak {
                self.peaks.add(t, before as f64);
            }
        }
        if let Some(g) = delivery {
            self.first_delivery.get_or_insert(t);
            self.freshest = Some(self.freshest.map_or(g, |u| u.max(g)));
        }
        if let Some(tr) = &mut self.trace {
            tr.push(before);
        }
        self.age = after;
        Ok(AoiStep { before, after, peak })
    }

    /// Time-average of `A(t)`; NaN before any measured sample.
    pub fn mean_age(&self) -> (f64, f64) {
        (self.ages.mean(), self.ages.std_error())
    }

    /// Mean of the peak samples; NaN before any measured peak.
    pub fn mean_peak(&self) -> (f64, f64) {
        (self.peaks.mean(), self.peaks.std_error())
    }

    pub fn peak_count(&self) -> u64 {
        self.peaks.count()
    }

    pub fn take_trace(&mut self) -> Vec<u64> {
        self.trace.take().unwrap_or_default()
    }
}
