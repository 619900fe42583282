//! Protocol-level simulator: real RLNC over an erasure network with an
//! end-to-end ACK after `D` slots.
//!
//! Per slot `t`, in order:
//! 1. an ACK scheduled for `t` flushes the decoded packets from the bucket;
//! 2. arrivals are drawn, stamped `t` and queued;
//! 3. with no generation in flight, the bucket is filled from the queue and a
//!    new generation opens (open mode also lets arrivals join a live one);
//! 4. every path with a nonzero water-filling share carries one packet per
//!    link: the source encodes, relays recode whatever they hold;
//! 5. the destination row-reduces what arrives and decodes at full rank;
//! 6. the age recursion is applied with the freshest decoded stamp;
//! 7. a decode at `t` schedules the ACK for slot `t + D + 1`.
//!
//! Relays forward within the same slot (cut-through), so a multihop chain
//! adds no pipeline latency beyond its erasures.

use std::collections::VecDeque;

use rand::Rng;

use super::aoi::AoiTracker;
use super::metrics::{aligned_avg, aligned_peak, BucketDelivery, DelayCosts, RunMetrics};
use super::rng::{sim_rng, SimRng};
use super::stats::BatchMeans;
use super::SimError;
use crate::codec::{encode, CodedPacket, DecoderState, SourcePacket};
use crate::field::{FieldSpec, GaloisField};
use crate::scenario::default_warmup;
use crate::scenario::{BucketJoin, ScenarioParams};
use crate::topology::{path_rates, waterfill_alloc, ErasureNetwork};

#[derive(Debug, Clone, PartialEq)]
pub enum Arrivals {
    /// Arrival with probability `lambda_raw`, admitted with probability `beta`.
    Bernoulli { lambda_raw: f64, beta: f64 },
    /// The bucket is topped up to `K` fresh packets whenever it is refilled.
    Saturated,
    /// One admitted arrival at each listed slot.
    Scheduled(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub arrivals: Arrivals,
    pub bucket: u32,
    pub packet_len: f64,
    pub feedback_delay: u64,
    pub bucket_join: BucketJoin,
    pub wait_for_full_bucket: bool,
    pub field: FieldSpec,
    pub payload_len: usize,
    /// Warmup slots; `None` uses the default for the run horizon.
    pub warmup: Option<u64>,
    pub record_trace: bool,
}

impl ProtocolConfig {
    pub fn from_params(params: &ScenarioParams) -> Result<Self, SimError> {
        params.validate()?;
        let d = params.feedback_delay;
        if d.fract() != 0.0 {
            return Err(SimError::Unsupported(format!("protocol-level D must be an integer, got {d}")));
        }
        let arrivals = if params.saturated {
            Arrivals::Saturated
        } else {
            let t = params.traffic()?;
            Arrivals::Bernoulli { lambda_raw: t.lambda_raw(), beta: t.beta() }
        };
        Ok(Self {
            arrivals,
            bucket: params.bucket,
            packet_len: params.packet_len,
            feedback_delay: d as u64,
            bucket_join: params.bucket_join,
            wait_for_full_bucket: params.wait_for_full_bucket,
            field: FieldSpec::with_order(params.field_order)?,
            payload_len: params.payload_len,
            warmup: params.warmup,
            record_trace: false,
        })
    }
}

pub fn run_protocol_sim(
    params: &ScenarioParams,
    net: &ErasureNetwork<f64>,
    horizon: u64,
    seed: u64,
) -> Result<RunMetrics, SimError> {
    run_protocol(&ProtocolConfig::from_params(params)?, net, horizon, seed)
}

struct Generation {
    id: u64,
    opened: u64,
    active: Vec<bool>,
}

struct Path {
    erasures: Vec<f64>,
    relays: Vec<Option<DecoderState>>,
}

struct Source {
    queue: VecDeque<SourcePacket>,
    bucket: Vec<SourcePacket>,
    generation: Option<Generation>,
    next_id: u64,
    ack: Option<(u64, usize)>,
}

fn fresh_packet(rng: &mut SimRng, field: &GaloisField, stamp: u64, len: usize) -> SourcePacket {
    SourcePacket { stamp, payload: (0..len).map(|_| field.random(rng)).collect() }
}

/// Ingests into a store that may have a different generation width.
fn ingest_padded(
    state: &mut DecoderState,
    field: &GaloisField,
    mut p: CodedPacket,
) -> Result<usize, SimError> {
    if p.coeffs.len() > state.size() {
        state.extend(p.coeffs.len());
    } else if p.coeffs.len() < state.size() {
        p.coeffs.resize(state.size(), 0);
    }
    Ok(state.ingest(field, &p)?)
}

/// Relay store: keeps only the newest generation it has heard of.
fn relay_receive(slot: &mut Option<DecoderState>, field: &GaloisField, p: CodedPacket) -> Result<(), SimError> {
    match slot {
        Some(s) if s.generation_id() > p.generation_id => return Ok(()),
        Some(s) if s.generation_id() == p.generation_id => {}
        _ => *slot = Some(DecoderState::new(p.generation_id, p.coeffs.len())),
    }
    let state = slot.as_mut().expect("relay state present");
    if !state.is_complete() || p.coeffs.len() > state.size() {
        ingest_padded(state, field, p)?;
    }
    Ok(())
}

pub fn run_protocol(
    cfg: &ProtocolConfig,
    net: &ErasureNetwork<f64>,
    horizon: u64,
    seed: u64,
) -> Result<RunMetrics, SimError> {
    if cfg.bucket == 0 {
        return Err(SimError::Unsupported("K must be at least 1".into()));
    }
    let rates = path_rates(net)?;
    crate::topology::end_to_end_rate(net, cfg.bucket)?;
    let warmup = cfg.warmup.unwrap_or_else(|| default_warmup(horizon));
    if horizon <= warmup {
        return Err(SimError::HorizonTooShort { horizon, warmup });
    }
    if let Arrivals::Bernoulli { lambda_raw, beta } = cfg.arrivals {
        if !(0.0..=1.0).contains(&lambda_raw) || !(0.0..=1.0).contains(&beta) {
            return Err(SimError::Unsupported("arrival probabilities must lie in [0, 1]".into()));
        }
    }

    let field = GaloisField::new(cfg.field);
    let mut rng = sim_rng(seed);
    let k = cfg.bucket as usize;
    let d = cfg.feedback_delay;
    let mut paths: Vec<Path> = net
        .paths()
        .into_iter()
        .map(|erasures| Path { relays: vec![None; erasures.len() - 1], erasures })
        .collect();
    let mut src = Source { queue: VecDeque::new(), bucket: Vec::new(), generation: None, next_id: 0, ack: None };
    let mut dest: Option<DecoderState> = None;
    let mut last_decoded: Option<u64> = None;
    let mut schedule = match &cfg.arrivals {
        Arrivals::Scheduled(s) => {
            let mut s = s.clone();
            s.sort_unstable();
            s.into_iter().peekable()
        }
        _ => Vec::new().into_iter().peekable(),
    };

    let mut tracker = AoiTracker::new(warmup, horizon + 1);
    if cfg.record_trace {
        tracker = tracker.with_trace();
    }
    let mut rate = BatchMeans::new(warmup, horizon + 1, BatchMeans::DEFAULT_BATCHES);
    let origin = -(d as f64);
    let mut last_delivery: Option<f64> = None;
    let mut log = Vec::new();
    let mut gaps = Vec::new();
    let mut generation_slots = Vec::new();
    let (mut admitted, mut delivered, mut decoded_unacked) = (0u64, 0u64, 0usize);
    let (mut generations, mut dependent, mut redundant, mut transmissions) = (0u64, 0u64, 0u64, 0u64);

    for t in 1..=horizon {
        // 1. ACK
        if let Some((at, n)) = src.ack {
            if at == t {
                src.bucket.drain(..n);
                src.generation = None;
                src.ack = None;
                decoded_unacked = 0;
            }
        }

        // 2. arrivals
        match &cfg.arrivals {
            Arrivals::Bernoulli { lambda_raw, beta } => {
                if *lambda_raw > 0.0 && rng.random_bool(*lambda_raw) && rng.random_bool(*beta) {
                    src.queue.push_back(fresh_packet(&mut rng, &field, t, cfg.payload_len));
                    admitted += 1;
                }
            }
            Arrivals::Scheduled(_) => {
                while schedule.next_if(|&s| s <= t).is_some() {
                    src.queue.push_back(fresh_packet(&mut rng, &field, t, cfg.payload_len));
                    admitted += 1;
                }
            }
            Arrivals::Saturated => {}
        }

        // 3. bucket
        if src.generation.is_none() && src.ack.is_none() {
            if cfg.arrivals == Arrivals::Saturated {
                while src.bucket.len() < k {
                    src.bucket.push(fresh_packet(&mut rng, &field, t, cfg.payload_len));
                    admitted += 1;
                }
            } else if !cfg.wait_for_full_bucket || src.bucket.len() + src.queue.len() >= k {
                while src.bucket.len() < k {
                    match src.queue.pop_front() {
                        Some(p) => src.bucket.push(p),
                        None => break,
                    }
                }
            }
            if !src.bucket.is_empty() && (!cfg.wait_for_full_bucket || src.bucket.len() == k) {
                let alloc = waterfill_alloc(src.bucket.len() as u32, &rates)?;
                src.generation = Some(Generation {
                    id: src.next_id,
                    opened: t,
                    active: alloc.counts.iter().map(|&c| c > 0).collect(),
                });
                src.next_id += 1;
            }
        } else if cfg.bucket_join == BucketJoin::Open && src.generation.is_some() {
            while src.bucket.len() < k {
                match src.queue.pop_front() {
                    Some(p) => src.bucket.push(p),
                    None => break,
                }
            }
        }

        // 4. transmissions, 5. destination
        let mut decoded_now: Option<(u64, usize, u64, u64)> = None;
        if let Some(gen) = &src.generation {
            for (path, &active) in paths.iter_mut().zip(&gen.active) {
                if !active {
                    continue;
                }
                let hops = path.erasures.len();
                for h in 0..hops {
                    let packet = if h == 0 {
                        Some(encode(&field, gen.id, &src.bucket, &mut rng)?)
                    } else {
                        match &path.relays[h - 1] {
                            Some(s) if s.rank() > 0 => Some(s.recode(&field, &mut rng)?),
                            _ => None,
                        }
                    };
                    let Some(packet) = packet else { continue };
                    transmissions += 1;
                    if rng.random_bool(path.erasures[h]) {
                        continue;
                    }
                    if h + 1 < hops {
                        relay_receive(&mut path.relays[h], &field, packet)?;
                        continue;
                    }
                    let id = packet.generation_id;
                    if last_decoded.is_some_and(|g| id <= g) {
                        redundant += 1;
                        continue;
                    }
                    if dest.as_ref().is_some_and(|s| s.generation_id() > id) {
                        continue;
                    }
                    if dest.as_ref().is_none_or(|s| s.generation_id() != id) {
                        dest = Some(DecoderState::new(id, packet.coeffs.len()));
                    }
                    let state = dest.as_mut().expect("destination state present");
                    ingest_padded(state, &field, packet)?;
                    if state.is_complete() {
                        let n = state.size();
                        let solved = state.solve()?;
                        if solved.iter().zip(&src.bucket[..n]).any(|(a, b)| *a != b.payload) {
                            return Err(SimError::DecodeMismatch { generation: id });
                        }
                        let stamp = state.freshest_stamp().expect("decoded generation has a stamp");
                        decoded_now = Some((id, n, stamp, state.dependent()));
                        last_decoded = Some(id);
                        dest = None;
                    }
                }
            }
        }

        let mut delivery = None;
        if let Some((_, n, stamp, dep)) = decoded_now {
            let gen = src.generation.as_ref().expect("decode implies an open generation");
            let time = t as f64;
            if t >= warmup {
                generation_slots.push(t - gen.opened + 1);
                let gap = time - last_delivery.unwrap_or(origin);
                rate.add_weighted(t, n as f64, gap);
                gaps.push(gap);
                log.push(BucketDelivery { time, size: n as u32 });
            }
            last_delivery = Some(time);
            generations += 1;
            dependent += dep;
            delivered += n as u64;
            decoded_unacked = n;
            src.ack = Some((t + d + 1, n));
            delivery = Some(stamp);
        }

        // 6. age
        tracker.step(t, delivery)?;
    }

    let (raw_avg, raw_avg_se) = tracker.mean_age();
    let (raw_peak, raw_peak_se) = tracker.mean_peak();
    let first_origin = log.first().map(|b: &BucketDelivery| b.time - gaps[0]).unwrap_or(origin);
    let delay_cost = DelayCosts::from_log(&log, first_origin, cfg.packet_len).unwrap_or_else(|_| DelayCosts::nan());
    let (throughput, throughput_se) = super::metrics::rate_estimate(&rate);
    let pending = (src.queue.len() + src.bucket.len() - decoded_unacked) as u64;
    Ok(RunMetrics {
        seed,
        ticks_per_slot: 1,
        measured_slots: horizon + 1 - warmup,
        avg_aoi: aligned_avg(raw_avg, 1),
        avg_aoi_se: raw_avg_se,
        peak_aoi: aligned_peak(raw_peak, 1),
        peak_aoi_se: raw_peak_se,
        avg_aoi_raw: raw_avg,
        peak_aoi_raw: raw_peak,
        throughput,
        throughput_se,
        delay_cost,
        inter_delivery: gaps,
        generations_decoded: generations,
        generation_slots,
        dependent_packets: dependent,
        redundant_packets: redundant,
        transmissions,
        packets_admitted: admitted,
        packets_delivered: delivered,
        packets_pending: pending,
        age_trace: tracker.take_trace(),
    })
}
