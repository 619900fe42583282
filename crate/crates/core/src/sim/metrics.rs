//! Run summaries and empirical delay costs.

use super::SimError;

/// A bucket of `size` packets delivered together at `time` (slots).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucketDelivery {
    pub time: f64,
    pub size: u32,
}

/// Empirical `d(1)`, `d(2)` and `d(∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayCosts {
    pub d1: f64,
    pub d2: f64,
    pub d_inf: f64,
}

/// Delay cost of an ordered delivery log.
///
/// Inside a bucket the first packet carries the whole gap since the previous
/// delivery (`origin` for the first bucket) and the others carry zero. The
/// per-position means over buckets are raised to `p`, averaged over the `N`
/// delivered packets and normalized by `L`. `p = ∞` gives the largest
/// positional mean over `L`.
pub fn empirical_dp(
    deliveries: &[BucketDelivery],
    origin: f64,
    p: f64,
    packet_len: f64,
) -> Result<f64, SimError> {
    let n: u64 = deliveries.iter().map(|b| b.size as u64).sum();
    if n == 0 {
        return Err(SimError::NoDeliveries);
    }
    if p.is_nan() || p < 1.0 {
        return Err(SimError::Unsupported(format!("p must be at least 1, got {p}")));
    }
    let width = deliveries.iter().map(|b| b.size).max().unwrap_or(0) as usize;
    let mut sums = vec![0.0; width];
    let mut counts = vec![0u64; width];
    let mut prev = origin;
    for b in deliveries {
        sums[0] += b.time - prev;
        for c in &mut counts[..b.size as usize] {
            *c += 1;
        }
        prev = b.time;
    }
    let means: Vec<f64> = sums.iter().zip(&counts).map(|(&s, &c)| s / c as f64).collect();
    if p.is_infinite() {
        let m = means.iter().copied().fold(0.0, f64::max);
        return Ok(m / packet_len);
    }
    let total: f64 = means.iter().zip(&counts).map(|(&m, &c)| c as f64 * m.powf(p)).sum();
    Ok((total / n as f64).powf(p.recip()) / packet_len)
}

impl DelayCosts {
    pub fn from_log(deliveries: &[BucketDelivery], origin: f64, packet_len: f64) -> Result<Self, SimError> {
        Ok(Self {
            d1: empirical_dp(deliveries, origin, 1.0, packet_len)?,
            d2: empirical_dp(deliveries, origin, 2.0, packet_len)?,
            d_inf: empirical_dp(deliveries, origin, f64::INFINITY, packet_len)?,
        })
    }

    pub fn nan() -> Self {
        Self { d1: f64::NAN, d2: f64::NAN, d_inf: f64::NAN }
    }
}

/// Empirical AoI is reported twice. `*_raw` is the recursion applied
/// verbatim on the tick grid, in ticks converted to slots. The aligned
/// values add the offsets that make the discrete measurement coincide with
/// the continuous-time quantities the closed forms describe.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub seed: u64,
    pub ticks_per_slot: u64,
    pub measured_slots: u64,
    pub avg_aoi: f64,
    pub avg_aoi_se: f64,
    pub peak_aoi: f64,
    pub peak_aoi_se: f64,
    pub avg_aoi_raw: f64,
    pub peak_aoi_raw: f64,
    /// Delivered packets per slot.
    pub throughput: f64,
    pub throughput_se: f64,
    pub delay_cost: DelayCosts,
    /// Gap preceding each measured bucket delivery, in slots.
    pub inter_delivery: Vec<f64>,
    pub generations_decoded: u64,
    /// Transmission slots per measured generation (protocol level).
    pub generation_slots: Vec<u64>,
    pub dependent_packets: u64,
    pub redundant_packets: u64,
    pub transmissions: u64,
    pub packets_admitted: u64,
    pub packets_delivered: u64,
    pub packets_pending: u64,
    /// `A(t)` per step when tracing was requested.
    pub age_trace: Vec<u64>,
}

/// Delivered packets per slot from a renewal-reward batch estimate; zero
/// when nothing was delivered.
pub fn rate_estimate(b: &super::stats::BatchMeans) -> (f64, f64) {
    if b.count() == 0 {
        return (0.0, 0.0);
    }
    (b.mean(), b.std_error())
}

/// Continuous time-average age, from the raw tick mean.
pub fn aligned_avg(raw_ticks: f64, ticks_per_slot: u64) -> f64 {
    (raw_ticks + 1.5) / ticks_per_slot as f64 + 0.5
}

/// Age just before the update, from the raw tick peak mean.
pub fn aligned_peak(raw_ticks: f64, ticks_per_slot: u64) -> f64 {
    (raw_ticks + 2.0) / ticks_per_slot as f64
}
