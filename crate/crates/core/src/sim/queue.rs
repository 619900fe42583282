//! Queue-level simulator: a Ber/G/1 FIFO queue whose per-packet service
//! time is `(X + D) / (L K)` slots with `X ~ NegBin(K, r)`.
//!
//! Time runs on a grid of `L K` ticks per slot. Arrivals happen at slot
//! boundaries, service takes `X + D` ticks, and the age recursion is applied
//! once per tick. A packet that departs at tick `e` is registered as a
//! delivery in the step for tick `e - 1`, so `A(e) = e - 1 - stamp`.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::aoi::AoiTracker;
use super::metrics::{aligned_avg, aligned_peak, BucketDelivery, DelayCosts, RunMetrics};
use super::rng::sim_rng;
use super::stats::BatchMeans;
use super::SimError;
use crate::analytics::STABILITY_MARGIN;
use crate::scenario::default_warmup;
use crate::scenario::ScenarioParams;

/// Fully resolved inputs of a queue-level run.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueConfig {
    /// Admitted arrival probability per slot.
    pub lambda: f64,
    /// End-to-end success probability per transmission.
    pub rate: f64,
    pub bucket: u32,
    pub packet_len: f64,
    /// Feedback delay in ticks.
    pub feedback_delay: u64,
    /// Warmup slots; `None` uses the default for the run horizon.
    pub warmup: Option<u64>,
    pub record_trace: bool,
}

impl QueueConfig {
    pub fn from_params(params: &ScenarioParams) -> Result<Self, SimError> {
        params.validate()?;
        let d = params.feedback_delay;
        if d.fract() != 0.0 {
            return Err(SimError::Unsupported(format!("queue-level D must be an integer, got {d}")));
        }
        Ok(Self {
            lambda: params.lambda()?,
            rate: params.rate()?,
            bucket: params.bucket,
            packet_len: params.packet_len,
            feedback_delay: d as u64,
            warmup: params.warmup,
            record_trace: false,
        })
    }

    /// Ticks per slot, `L K`, which must be a positive integer.
    pub fn ticks_per_slot(&self) -> Result<u64, SimError> {
        let lk = self.packet_len * self.bucket as f64;
        if lk < 1.0 || lk.fract() != 0.0 {
            return Err(SimError::Unsupported(format!("L*K must be a positive integer, got {lk}")));
        }
        Ok(lk as u64)
    }

    pub fn utilization(&self) -> f64 {
        let k = self.bucket as f64;
        let mean_service = (k / self.rate + self.feedback_delay as f64) / (self.packet_len * k);
        self.lambda * mean_service
    }
}

/// Runs the queue-level model described by `params`.
pub fn run_queue_sim(params: &ScenarioParams, horizon: u64, seed: u64) -> Result<RunMetrics, SimError> {
    run_queue(&QueueConfig::from_params(params)?, horizon, seed)
}

pub fn run_queue(cfg: &QueueConfig, horizon: u64, seed: u64) -> Result<RunMetrics, SimError> {
    if !(cfg.rate > 0.0 && cfg.rate <= 1.0) {
        return Err(SimError::Unsupported(format!(
            "queue-level service needs a per-transmission success probability in (0, 1], got {}",
            cfg.rate
        )));
    }
    if !(0.0..1.0).contains(&cfg.lambda) {
        return Err(SimError::Unsupported(format!("lambda must lie in [0, 1), got {}", cfg.lambda)));
    }
    let rho = cfg.utilization();
    if rho >= 1.0 - STABILITY_MARGIN {
        return Err(SimError::Unstable { rho });
    }
    let warmup = cfg.warmup.unwrap_or_else(|| default_warmup(horizon));
    if horizon <= warmup {
        return Err(SimError::HorizonTooShort { horizon, warmup });
    }
    let tps = cfg.ticks_per_slot()?;

    let mut rng = sim_rng(seed);
    let geometric = Geometric::new(cfg.rate).map_err(|e| SimError::Unsupported(e.to_string()))?;
    let mut tracker = AoiTracker::new(warmup * tps, horizon * tps);
    if cfg.record_trace {
        tracker = tracker.with_trace();
    }
    // packets over elapsed time between deliveries
    let mut rate = BatchMeans::new(warmup, horizon, BatchMeans::DEFAULT_BATCHES);

    // (departure tick, arrival tick)
    let mut pending: VecDeque<(u64, u64)> = VecDeque::new();
    let mut free_at = 0u64;
    let mut log: Vec<BucketDelivery> = Vec::new();
    let mut last_departure: Option<f64> = None;
    let origin = -(cfg.feedback_delay as f64) / tps as f64;
    let mut admitted = 0u64;
    let mut delivered = 0u64;
    let mut gaps = Vec::new();

    for slot in 0..horizon {
        let t0 = slot * tps;
        if cfg.lambda > 0.0 && rng.random_bool(cfg.lambda) {
            // X counts transmissions up to and including the K-th success
            let x: u64 = (0..cfg.bucket).map(|_| 1 + geometric.sample(&mut rng)).sum();
            let start = free_at.max(t0);
            free_at = start + x + cfg.feedback_delay;
            pending.push_back((free_at, t0));
            admitted += 1;
        }
        for tick in t0..t0 + tps {
            let delivery = match pending.front() {
                Some(&(dep, stamp)) if dep - 1 == tick => {
                    pending.pop_front();
                    delivered += 1;
                    let time = dep as f64 / tps as f64;
                    if slot >= warmup {
                        let gap = time - last_departure.unwrap_or(origin);
                        rate.add_weighted(slot, 1.0, gap);
                        gaps.push(gap);
                        log.push(BucketDelivery { time, size: 1 });
                    }
                    last_departure = Some(time);
                    Some(stamp)
                }
                _ => None,
            };
            tracker.step(tick, delivery)?;
        }
    }

    let (raw_avg, raw_avg_se) = tracker.mean_age();
    let (raw_peak, raw_peak_se) = tracker.mean_peak();
    let tpsf = tps as f64;
    let first_origin = log.first().map(|b| b.time - gaps[0]).unwrap_or(origin);
    let delay_cost = DelayCosts::from_log(&log, first_origin, cfg.packet_len).unwrap_or_else(|_| DelayCosts::nan());
    let (throughput, throughput_se) = super::metrics::rate_estimate(&rate);
    Ok(RunMetrics {
        seed,
        ticks_per_slot: tps,
        measured_slots: horizon - warmup,
        avg_aoi: aligned_avg(raw_avg, tps),
        avg_aoi_se: raw_avg_se / tpsf,
        peak_aoi: aligned_peak(raw_peak, tps),
        peak_aoi_se: raw_peak_se / tpsf,
        avg_aoi_raw: raw_avg / tpsf,
        peak_aoi_raw: raw_peak / tpsf,
        throughput,
        throughput_se,
        delay_cost,
        inter_delivery: gaps,
        generations_decoded: delivered,
        generation_slots: Vec::new(),
        dependent_packets: 0,
        redundant_packets: 0,
        transmissions: 0,
        packets_admitted: admitted,
        packets_delivered: delivered,
        packets_pending: pending.len() as u64,
        age_trace: tracker.take_trace(),
    })
}
