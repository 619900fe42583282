//! Closed-form timeliness analysis of adaptive coding over an erasure path.
//!
//! A bucket of `K` packets takes `X ~ NegBin(r, K)` slots to deliver plus a
//! feedback delay `D`, so each packet sees a service time
//! `S = (X + D) / (L K)`. Arrivals are Bernoulli with admitted rate `λ` per
//! slot, which makes the source a discrete-time Ber/G/1 queue. Everything in
//! this module follows from the first two moments and the PGF of `S`.
//!
//! Two algebraically independent routes are provided for the age metrics:
//! [`peak_aoi`] / [`avg_aoi`] go through the generic Ber/G/1 expressions
//! (mean wait, moments, PGF), while [`peak_aoi_closed_form`] /
//! [`avg_aoi_closed_form`] evaluate the fully expanded expressions in
//! `(λ, K, L, D, r)`. Tests hold them to each other.
//!
//! End-to-end rates above one (parallel paths) are accepted and treated as a
//! deterministic time rescaling: a coded packet then takes exactly `1/r`
//! slots. This coincides with the negative-binomial model at `r = 1`.

use thiserror::Error;

use crate::scalar::Real;

/// Utilization at or above `1 - STABILITY_MARGIN` is rejected.
pub const STABILITY_MARGIN: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    Parameter { name: &'static str, value: f64, reason: &'static str },
    #[error("unstable queue: utilization {rho} >= 1")]
    Unstable { rho: f64 },
    #[error("{what} outside its domain at {value}")]
    Domain { what: &'static str, value: f64 },
}

fn param<T: Real>(name: &'static str, value: T, reason: &'static str) -> AnalyticsError {
    AnalyticsError::Parameter { name, value: value.to_f64().unwrap_or(f64::NAN), reason }
}

/// Service-time model of one packet: `S = (X + D)/(L K)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceModel<T> {
    rate: T,
    packet_len: T,
    feedback_delay: T,
    bucket: u32,
}

impl<T: Real> ServiceModel<T> {
    /// `rate` is the end-to-end success probability per slot `r`,
    /// `packet_len` is `L`, `feedback_delay` is `D` (slots) and `bucket` is `K`.
    pub fn new(rate: T, packet_len: T, feedback_delay: T, bucket: u32) -> Result<Self, AnalyticsError> {
        if !(rate > T::zero() && rate.is_finite()) {
            return Err(param("r", rate, "must be positive and finite"));
        }
        if !(packet_len > T::zero() && packet_len.is_finite()) {
            return Err(param("L", packet_len, "must be positive and finite"));
        }
        if !(feedback_delay >= T::zero() && feedback_delay.is_finite()) {
            return Err(param("D", feedback_delay, "must be non-negative"));
        }
        if bucket == 0 {
            return Err(param("K", T::zero(), "bucket size must be at least 1"));
        }
        Ok(Self { rate, packet_len, feedback_delay, bucket })
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn packet_len(&self) -> T {
        self.packet_len
    }

    pub fn feedback_delay(&self) -> T {
        self.feedback_delay
    }

    pub fn bucket(&self) -> u32 {
        self.bucket
    }

    pub fn with_bucket(self, bucket: u32) -> Result<Self, AnalyticsError> {
        Self::new(self.rate, self.packet_len, self.feedback_delay, bucket)
    }

    pub fn with_rate(self, rate: T) -> Result<Self, AnalyticsError> {
        Self::new(rate, self.packet_len, self.feedback_delay, self.bucket)
    }

    pub fn with_feedback_delay(self, d: T) -> Result<Self, AnalyticsError> {
        Self::new(self.rate, self.packet_len, d, self.bucket)
    }

    fn k(&self) -> T {
        T::from_count(self.bucket)
    }

    /// Whether deliveries are random (negative binomial) or deterministic.
    fn lossy(&self) -> bool {
        self.rate < T::one()
    }

    /// `E[S] = 1/(rL) + D/(LK)`.
    pub fn mean(&self) -> T {
        let (r, l, d, k) = (self.rate, self.packet_len, self.feedback_delay, self.k());
        T::one() / (r * l) + d / (l * k)
    }

    /// `Var(S) = (1-r)/(L^2 K r^2)`, zero when `r >= 1`.
    pub fn variance(&self) -> T {
        if !self.lossy() {
            return T::zero();
        }
        let (r, l, k) = (self.rate, self.packet_len, self.k());
        (T::one() - r) / (l * l * k * r * r)
    }

    /// `E[S^2] = ((1-r)K + (K+Dr)^2) / (LrK)^2`.
    pub fn second_moment(&self) -> T {
        if !self.lossy() {
            return self.mean() * self.mean();
        }
        let (r, l, d, k) = (self.rate, self.packet_len, self.feedback_delay, self.k());
        let kd = k + d * r;
        let lrk = l * r * k;
        ((T::one() - r) * k + kd * kd) / (lrk * lrk)
    }

    /// Natural log of the PGF `L_S(z)` for `0 < z <= 1`.
    pub fn ln_pgf(&self, z: T) -> Result<T, AnalyticsError> {
        if !(z > T::zero() && z <= T::one()) {
            return Err(AnalyticsError::Domain {
                what: "service PGF argument",
                value: z.to_f64().unwrap_or(f64::NAN),
            });
        }
        let ln_z = z.ln();
        if !self.lossy() {
            return Ok(self.mean() * ln_z);
        }
        let (r, l, d, k) = (self.rate, self.packet_len, self.feedback_delay, self.k());
        let lk = l * k;
        let ln_y = ln_z / lk;
        let fail = (T::one() - r) * ln_y.exp();
        // ln(r y / (1 - (1-r) y))
        let ln_attempt = r.ln() + ln_y - (-fail).ln_1p();
        Ok(d / lk * ln_z + k * ln_attempt)
    }

    /// `L_S(z) = z^{D/(LK)} (r z^{1/(LK)} / (1 - (1-r) z^{1/(LK)}))^K`.
    pub fn pgf(&self, z: T) -> Result<T, AnalyticsError> {
        self.ln_pgf(z).map(T::exp)
    }

    /// Delay cost `d(p) = (K/r + D)/(L K^{1/p})`, non-decreasing in `p`.
    /// `p` may be infinite.
    pub fn delay_cost(&self, p: T) -> Result<T, AnalyticsError> {
        if p.is_nan() || p < T::one() {
            return Err(param("p", p, "norm order must be at least 1"));
        }
        let (r, l, d, k) = (self.rate, self.packet_len, self.feedback_delay, self.k());
        let spread = if p.is_infinite() { T::one() } else { k.powf(p.recip()) };
        Ok((k / r + d) / (l * spread))
    }

    /// `μ = 1/d(1)`, packets per slot.
    pub fn throughput(&self) -> T {
        self.mean().recip()
    }

    /// `ρ = λ E[S]`.
    pub fn utilization(&self, lambda: T) -> T {
        lambda * self.mean()
    }
}

/// Admitted Bernoulli arrival process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficSpec<T> {
    lambda: T,
    beta: T,
    lambda_raw: T,
}

impl<T: Real> TrafficSpec<T> {
    /// Raw arrivals thinned by admission probability `beta`.
    pub fn new(lambda_raw: T, beta: T) -> Result<Self, AnalyticsError> {
        if !(beta > T::zero() && beta <= T::one()) {
            return Err(param("beta", beta, "admission probability must lie in (0, 1]"));
        }
        if !(lambda_raw > T::zero() && lambda_raw <= T::one()) {
            return Err(param("lambda_raw", lambda_raw, "arrival probability must lie in (0, 1]"));
        }
        let lambda = beta * lambda_raw;
        if lambda >= T::one() {
            return Err(param("lambda", lambda, "admitted rate must be below 1"));
        }
        Ok(Self { lambda, beta, lambda_raw })
    }

    /// Admitted rate given directly (`beta = 1`).
    pub fn admitted(lambda: T) -> Result<Self, AnalyticsError> {
        if !(lambda > T::zero() && lambda < T::one()) {
            return Err(param("lambda", lambda, "admitted rate must lie in (0, 1)"));
        }
        Ok(Self { lambda, beta: T::one(), lambda_raw: lambda })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn lambda_raw(&self) -> T {
        self.lambda_raw
    }
}

/// All analytic quantities for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoiResult<T> {
    pub avg_aoi: T,
    pub peak_aoi: T,
    pub mean_wait: T,
    pub utilization: T,
    pub throughput: T,
}

fn stable_utilization<T: Real>(t: &TrafficSpec<T>, m: &ServiceModel<T>) -> Result<T, AnalyticsError> {
    let rho = m.utilization(t.lambda);
    // NaN counts as unstable
    if rho.is_nan() || rho >= T::one() - T::lit(STABILITY_MARGIN) {
        return Err(AnalyticsError::Unstable { rho: rho.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(rho)
}

/// Ber/G/1 mean waiting time `(λE[S²] − ρ)/(2(1 − ρ))`.
pub fn mean_wait<T: Real>(t: &TrafficSpec<T>, m: &ServiceModel<T>) -> Result<T, AnalyticsError> {
    let rho = stable_utilization(t, m)?;
    let two = T::lit(2.0);
    Ok((t.lambda * m.second_moment() - rho) / (two * (T::one() - rho)))
}

/// Peak age `1/λ + 1/μ + E[W]`.
pub fn peak_aoi<T: Real>(t: &TrafficSpec<T>, m: &ServiceModel<T>) -> Result<T, AnalyticsError> {
    Ok(t.lambda.recip() + m.mean() + mean_wait(t, m)?)
}

/// Average age `1 + 1/μ + (1−λ)(1−ρ)/(λ L_S(1−λ)) + E[W]`.
pub fn avg_aoi<T: Real>(t: &TrafficSpec<T>, m: &ServiceModel<T>) -> Result<T, AnalyticsError> {
    let rho = stable_utilization(t, m)?;
    let lam = t.lambda;
    let ln_idle = (-lam).ln_1p() + (T::one() - rho).ln() - lam.ln();
    let renewal = (ln_idle - m.ln_pgf(T::one() - lam)?).exp();
    Ok(T::one() + m.mean() + renewal + mean_wait(t, m)?)
}

fn expanded_negbin<T: Real>(m: &ServiceModel<T>) -> Result<(T, T, T, T), AnalyticsError> {
    if m.rate > T::one() {
        return Err(AnalyticsError::Domain {
            what: "expanded closed form (requires r <= 1)",
            value: m.rate.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok((m.rate, m.packet_len, m.feedback_delay, m.k()))
}

/// Peak age from the expanded expression in `(λ, K, L, D, r)`.
pub fn peak_aoi_closed_form<T: Real>(t: &TrafficSpec<T>, m: &ServiceModel<T>) -> Result<T, AnalyticsError> {
    stable_utilization(t, m)?;
    let (r, l, d, k) = expanded_negbin(m)?;
    let lam = t.lambda;
    let klr = k * l * r;
    let kdr = k + d * r;
    let num = lam * (k * (T::one() - r) - klr * kdr + kdr * kdr);
    let den = T::lit(2.0) * (klr * klr - lam * klr * kdr);
    Ok(lam.recip() + kdr / klr + num / den)
}

/// Average age from the expanded expression in `(λ, K, L, D, r)`.
pub fn avg_aoi_closed_form<T: Real>(t: &TrafficSpec<T>, m: &ServiceModel<T>) -> Result<T, AnalyticsError> {
    let peak = peak_aoi_closed_form(t, m)?;
    let (r, l, d, k) = expanded_negbin(m)?;
    let lam = t.lambda;
    let lk = l * k;
    let ln_idle = (-lam).ln_1p();
    let y = (ln_idle / lk).exp();
    let num = (T::one() - lam) * (T::one() - lam * (k + d * r) / (k * l * r));
    // λ (1-λ)^{D/(LK)} (r y / (1 - (1-r) y))^K, in logs
    let ln_den = lam.ln() + d / lk * ln_idle + k * (r * y / (T::one() - (T::one() - r) * y)).ln();
    Ok(peak + (T::one() - lam.recip()) + num / ln_den.exp())
}

/// Evaluates every analytic quantity at one operating point.
pub fn evaluate<T: Real>(t: &TrafficSpec<T>, m: &ServiceModel<T>) -> Result<AoiResult<T>, AnalyticsError> {
    Ok(AoiResult {
        avg_aoi: avg_aoi(t, m)?,
        peak_aoi: peak_aoi(t, m)?,
        mean_wait: mean_wait(t, m)?,
        utilization: m.utilization(t.lambda),
        throughput: m.throughput(),
    })
}

/// Admitted rate giving utilization `rho`: `λ = ρ / E[S]`.
pub fn lambda_for_utilization<T: Real>(rho: T, m: &ServiceModel<T>) -> Result<T, AnalyticsError> {
    if !(rho > T::zero() && rho < T::one()) {
        return Err(param("rho", rho, "utilization must lie in (0, 1)"));
    }
    let lambda = rho / m.mean();
    if lambda >= T::one() {
        return Err(AnalyticsError::Domain {
            what: "arrival probability implied by utilization",
            value: lambda.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(lambda)
}

/// How the coded configuration's arrival rate relates to the uncoded baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupling {
    /// Coded system runs at the same utilization as the baseline.
    FixedUtilization,
    /// Coded system sees the baseline's arrival rate.
    FixedArrivalRate,
}

impl Coupling {
    pub const ALL: [Coupling; 2] = [Coupling::FixedUtilization, Coupling::FixedArrivalRate];

    pub fn name(&self) -> &'static str {
        match self {
            Coupling::FixedUtilization => "fixed-utilization",
            Coupling::FixedArrivalRate => "fixed-arrival-rate",
        }
    }
}

/// Reduction in average age from `K = 1` (at utilization `rho0`) to bucket `k`, with `L = 1`.
pub fn aaoi_reduction<T: Real>(
    k: u32,
    feedback_delay: T,
    rate: T,
    rho0: T,
    coupling: Coupling,
) -> Result<T, AnalyticsError> {
    if k < 2 {
        return Err(param("K", T::from_count(k), "coded bucket must hold at least 2 packets"));
    }
    let uncoded = ServiceModel::new(rate, T::one(), feedback_delay, 1)?;
    let coded = uncoded.with_bucket(k)?;
    let lambda0 = lambda_for_utilization(rho0, &uncoded)?;
    let baseline = avg_aoi(&TrafficSpec::admitted(lambda0)?, &uncoded)?;
    let lambda = match coupling {
        Coupling::FixedUtilization => lambda_for_utilization(rho0, &coded)?,
        Coupling::FixedArrivalRate => lambda0,
    };
    Ok(baseline - avg_aoi(&TrafficSpec::admitted(lambda)?, &coded)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model(r: f64, l: f64, d: f64, k: u32) -> ServiceModel<f64> {
        ServiceModel::new(r, l, d, k).unwrap()
    }

    fn traffic(lambda: f64) -> TrafficSpec<f64> {
        TrafficSpec::admitted(lambda).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Brute-force moments of S = (X + D)/(LK), X ~ NegBin(r, K) on {K, K+1, ...}.
    fn negbin_moments(r: f64, l: f64, d: f64, k: u32) -> (f64, f64) {
        let (mut m1, mut m2) = (0.0, 0.0);
        let k_f = k as f64;
        // log C(x-1, k-1) + k ln r + (x-k) ln(1-r)
        let mut ln_binom = 0.0f64;
        for x in k as u64..20_000 {
            if x > k as u64 {
                ln_binom += ((x - 1) as f64).ln() - ((x - k as u64) as f64).ln();
            }
            let p = (ln_binom + k_f * r.ln() + (x as f64 - k_f) * (1.0 - r).ln()).exp();
            let s = (x as f64 + d) / (l * k_f);
            m1 += p * s;
            m2 += p * s * s;
        }
        (m1, m2)
    }

    #[test]
    fn service_mean_examples() {
        assert_eq!(model(1.0, 1.0, 0.0, 1).mean(), 1.0);
        assert!((model(0.8, 1.0, 1.0, 10).mean() - 1.35).abs() < 1e-12);
        assert!((model(0.25, 1.0, 1.0, 2).mean() - 4.5).abs() < 1e-12);
        let (m1, _) = negbin_moments(0.25, 1.0, 1.0, 2);
        assert!(rel(m1, 4.5) < 1e-9);
    }

    #[test]
    fn second_moment_examples() {
        let m = model(1.0, 1.0, 1.0, 2);
        assert!((m.second_moment() - 2.25).abs() < 1e-12);
        assert_eq!(m.variance(), 0.0);
        let m = model(0.25, 1.0, 1.0, 1);
        assert!((m.second_moment() - 37.0).abs() < 1e-12);
        let (_, m2) = negbin_moments(0.25, 1.0, 1.0, 1);
        assert!(rel(m2, 37.0) < 1e-9);
    }

    #[test]
    fn moments_match_brute_force_series() {
        for &(r, l, d, k) in &[(0.3, 1.0, 2.0, 3), (0.7, 2.0, 0.0, 5), (0.55, 0.5, 5.0, 10)] {
            let m = model(r, l, d, k);
            let (m1, m2) = negbin_moments(r, l, d, k);
            assert!(rel(m.mean(), m1) < 1e-9);
            assert!(rel(m.second_moment(), m2) < 1e-9);
        }
    }

    #[test]
    fn variance_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let m = model(rng.random_range(0.05..=1.0), rng.random_range(0.5..3.0), rng.random_range(0.0..10.0), rng.random_range(1..60));
            let v = m.second_moment() - m.mean() * m.mean();
            assert!(m.variance() >= 0.0);
            assert!((v - m.variance()).abs() <= 1e-12 * m.second_moment());
        }
    }

    #[test]
    fn pgf_examples() {
        let m = model(0.4, 1.0, 3.0, 4);
        assert!((m.pgf(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((model(1.0, 1.0, 1.0, 1).pgf(0.7).unwrap() - 0.49).abs() < 1e-12);
        assert!(m.pgf(0.0).is_err());
        assert!(m.pgf(1.5).is_err());
    }

    #[test]
    fn pgf_derivative_is_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let m = model(rng.random_range(0.1..=1.0), 1.0, rng.random_range(0.0..6.0), rng.random_range(1..30));
            let h = 1e-6;
            let deriv = (m.pgf(1.0).unwrap() - m.pgf(1.0 - h).unwrap()) / h;
            assert!(rel(deriv, m.mean()) < 1e-5, "{deriv} vs {}", m.mean());
        }
    }

    #[test]
    fn delay_cost_examples() {
        assert!((model(1.0, 1.0, 0.0, 5).delay_cost(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((model(0.8, 1.0, 1.0, 10).delay_cost(f64::INFINITY).unwrap() - 13.5).abs() < 1e-12);
        let m = model(0.25, 1.0, 1.0, 2);
        assert!((m.delay_cost(1.0).unwrap() - 4.5).abs() < 1e-12);
        assert_eq!(m.delay_cost(1.0).unwrap(), m.mean());
        assert!(m.delay_cost(0.5).is_err());
        assert!(m.delay_cost(f64::NAN).is_err());
    }

    #[test]
    fn delay_cost_monotone() {
        let m = model(0.6, 1.0, 2.0, 7);
        let ps = [1.0, 1.5, 2.0, 4.0, 10.0, 100.0, f64::INFINITY];
        // power-mean ordering: d(p) grows with p
        for w in ps.windows(2) {
            assert!(m.delay_cost(w[1]).unwrap() >= m.delay_cost(w[0]).unwrap());
        }
        for k in 1..50 {
            let (a, b) = (m.with_bucket(k).unwrap(), m.with_bucket(k + 1).unwrap());
            assert!(b.delay_cost(1.0).unwrap() < a.delay_cost(1.0).unwrap());
            assert!(b.delay_cost(f64::INFINITY).unwrap() > a.delay_cost(f64::INFINITY).unwrap());
            assert!(b.throughput() > a.throughput());
        }
    }

    #[test]
    fn throughput_examples() {
        assert_eq!(model(1.0, 1.0, 0.0, 1).throughput(), 1.0);
        assert!((model(0.8, 1.0, 1.0, 10).throughput() - 1.0 / 1.35).abs() < 1e-12);
        assert!((model(0.8, 1.0, 1.0, 1_000_000).throughput() - 0.8).abs() < 1e-4);
    }

    #[test]
    fn mean_wait_examples() {
        assert!(mean_wait(&traffic(1e-9), &model(0.7, 1.0, 1.0, 3)).unwrap().abs() < 1e-6);
        assert!((mean_wait(&traffic(0.3), &model(1.0, 1.0, 1.0, 1)).unwrap() - 0.75).abs() < 1e-12);
        assert!((mean_wait(&traffic(0.4), &model(1.0, 1.0, 1.0, 2)).unwrap() - 0.375).abs() < 1e-12);
        assert!(matches!(mean_wait(&traffic(0.6), &model(1.0, 1.0, 1.0, 1)), Err(AnalyticsError::Unstable { .. })));
    }

    #[test]
    fn peak_examples() {
        for lam in [0.1, 0.5, 0.9] {
            assert!(rel(peak_aoi(&traffic(lam), &model(1.0, 1.0, 0.0, 1)).unwrap(), 1.0 / lam + 1.0) < 1e-12);
        }
        assert!((peak_aoi(&traffic(0.3), &model(1.0, 1.0, 1.0, 1)).unwrap() - 6.083_333_333_333).abs() < 1e-9);
        assert!((peak_aoi(&traffic(0.4), &model(1.0, 1.0, 1.0, 2)).unwrap() - 4.375).abs() < 1e-12);
    }

    #[test]
    fn avg_examples() {
        // L_S(0.7) = 0.49: 1 + 2 + 0.7*0.4/(0.3*0.49) + 0.75
        let hand = 3.75 + 0.7 * 0.4 / (0.3 * 0.49);
        assert!((avg_aoi(&traffic(0.3), &model(1.0, 1.0, 1.0, 1)).unwrap() - hand).abs() < 1e-12);
        assert!((hand - 5.6548).abs() < 1e-4);
        // L_S(0.6) = 0.6^{1/2} * 0.6
        let hand = 1.0 + 1.5 + 0.6 * 0.4 / (0.4 * 0.6f64.powf(1.5)) + 0.375;
        assert!((avg_aoi(&traffic(0.4), &model(1.0, 1.0, 1.0, 2)).unwrap() - hand).abs() < 1e-12);
        assert!((hand - 4.1660).abs() < 1e-4);
        let a = avg_aoi(&traffic(0.6 / 1.1), &model(1.0, 1.0, 1.0, 10)).unwrap();
        assert!((a - 2.968).abs() < 0.002);
    }

    #[test]
    fn routes_agree_on_random_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 1000 {
            let m = model(rng.random_range(0.02..=1.0), rng.random_range(0.25..4.0), rng.random_range(0.0..20.0), rng.random_range(1..200));
            let Ok(lam) = lambda_for_utilization(rng.random_range(0.01..0.98), &m) else { continue };
            let t = traffic(lam);
            let (p1, p2) = (peak_aoi(&t, &m).unwrap(), peak_aoi_closed_form(&t, &m).unwrap());
            let (a1, a2) = (avg_aoi(&t, &m).unwrap(), avg_aoi_closed_form(&t, &m).unwrap());
            assert!(rel(p1, p2) < 1e-10, "{p1} {p2} {m:?} {lam}");
            assert!(rel(a1, a2) < 1e-10, "{a1} {a2} {m:?} {lam}");
            checked += 1;
        }
    }

    #[test]
    fn lambda_for_utilization_examples() {
        assert!((lambda_for_utilization(0.6, &model(1.0, 1.0, 1.0, 1)).unwrap() - 0.3).abs() < 1e-12);
        assert!((lambda_for_utilization(0.6, &model(1.0, 1.0, 1.0, 10)).unwrap() - 0.6 / 1.1).abs() < 1e-12);
        assert!((lambda_for_utilization(0.6, &model(0.25, 1.0, 1.0, 10)).unwrap() - 0.146_341_463).abs() < 1e-8);
        let m = model(0.8, 1.0, 1.0, 10);
        let lam = lambda_for_utilization(0.37, &m).unwrap();
        assert!((m.utilization(lam) - 0.37).abs() < 1e-12);
        assert!(lambda_for_utilization(1.2, &m).is_err());
        assert!(matches!(lambda_for_utilization(0.9, &model(1.0, 4.0, 0.0, 1)), Err(AnalyticsError::Domain { .. })));
    }

    #[test]
    fn reduction_anchors() {
        let v = aaoi_reduction(2, 1.0f64, 1.0, 0.6, Coupling::FixedArrivalRate).unwrap();
        // frozen from an independent evaluation of the same closed forms
        assert!((v - 0.758_963_999_770).abs() < 1e-9);
        let v = aaoi_reduction(10, 1.0f64, 0.25, 0.6, Coupling::FixedUtilization).unwrap();
        assert!((v - 3.907_339_625_426).abs() < 1e-9);
        let v = aaoi_reduction(10, 5.0f64, 1.0, 0.6, Coupling::FixedUtilization).unwrap();
        assert!((v - 13.358_040_674_636).abs() < 1e-9);
        assert!(aaoi_reduction(1, 1.0, 1.0, 0.6, Coupling::FixedUtilization).is_err());
    }

    #[test]
    fn avg_non_increasing_in_k() {
        for rho in [0.2, 0.6, 0.9] {
            let mut prev = f64::INFINITY;
            for k in 1..=50 {
                let m = model(0.8, 1.0, 1.0, k);
                let a = avg_aoi(&traffic(lambda_for_utilization(rho, &m).unwrap()), &m).unwrap();
                assert!(a <= prev + 1e-12, "rho={rho} K={k}");
                prev = a;
            }
        }
    }

    #[test]
    fn peak_bounds_average_on_default_grid() {
        for ri in 0..=75 {
            let r = 0.25 + ri as f64 * 0.01;
            for k in 1..=20 {
                let m = model(r, 1.0, 1.0, k);
                let t = traffic(lambda_for_utilization(0.6, &m).unwrap());
                assert!(peak_aoi(&t, &m).unwrap() >= avg_aoi(&t, &m).unwrap());
            }
        }
    }

    #[test]
    fn f32_scalar_agrees() {
        let m = ServiceModel::<f32>::new(1.0, 1.0, 1.0, 1).unwrap();
        let t = TrafficSpec::<f32>::admitted(0.3).unwrap();
        assert!((avg_aoi(&t, &m).unwrap() - 5.654_762).abs() < 1e-4);
        assert!((peak_aoi_closed_form(&t, &m).unwrap() - 6.083_333).abs() < 1e-4);
    }

    #[test]
    fn rates_above_one_are_deterministic() {
        let m = model(2.0, 1.0, 1.0, 4);
        assert_eq!(m.variance(), 0.0);
        assert!((m.mean() - 0.75).abs() < 1e-12);
        assert!((m.pgf(0.5).unwrap() - 0.5f64.powf(0.75)).abs() < 1e-12);
        let t = traffic(0.5);
        assert!(avg_aoi(&t, &m).is_ok());
        assert!(peak_aoi_closed_form(&t, &m).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(ServiceModel::new(0.0, 1.0, 1.0, 1).is_err());
        assert!(ServiceModel::new(0.5, 0.0, 1.0, 1).is_err());
        assert!(ServiceModel::new(0.5, 1.0, -1.0, 1).is_err());
        assert!(ServiceModel::new(0.5, 1.0, 1.0, 0).is_err());
        assert!(TrafficSpec::admitted(1.0).is_err());
        let t = TrafficSpec::new(0.5f64, 0.4).unwrap();
        assert!((t.lambda() - 0.2).abs() < 1e-15);
        assert!(TrafficSpec::new(0.5, 0.0).is_err());
    }
}
