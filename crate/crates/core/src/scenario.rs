//! One experiment operating point, shared by the analytics front-end and
//! both simulators.

use thiserror::Error;

use crate::analytics::{lambda_for_utilization, AnalyticsError, ServiceModel, TrafficSpec};
use crate::topology::{end_to_end_rate, ErasureNetwork, TopologyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// Offered load, given either as admitted arrival rate or as utilization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Load {
    Lambda(f64),
    Rho(f64),
}

/// Whether packets may join a generation that is already being transmitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BucketJoin {
    /// Membership is frozen when the generation opens.
    #[default]
    Closed,
    /// Arrivals join while the bucket holds fewer than `K` packets.
    Open,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub load: Load,
    /// Admission probability β.
    pub beta: f64,
    /// Bucket size `K`.
    pub bucket: u32,
    /// Packet length `L`.
    pub packet_len: f64,
    /// Feedback delay `D` in slots.
    pub feedback_delay: f64,
    pub network: ErasureNetwork<f64>,
    /// Field size q.
    pub field_order: u32,
    pub horizon: u64,
    pub replications: u32,
    pub base_seed: u64,
    pub bucket_join: BucketJoin,
    pub wait_for_full_bucket: bool,
    /// Source always backlogged (protocol level only).
    pub saturated: bool,
    /// Payload symbols per packet (protocol level only).
    pub payload_len: usize,
    /// Overrides the default warmup of max(5% of horizon, 1000 slots).
    pub warmup: Option<u64>,
}

impl Default for ScenarioParams {
    /// `L = 1`, `D = 1`, `ρ = 0.6`, single link with `r = 0.8`, `K = 1`.
    fn default() -> Self {
        Self {
            load: Load::Rho(0.6),
            beta: 1.0,
            bucket: 1,
            packet_len: 1.0,
            feedback_delay: 1.0,
            network: ErasureNetwork::Single(1.0 - 0.8),
            field_order: 256,
            horizon: 1_000_000,
            replications: 1,
            base_seed: 1,
            bucket_join: BucketJoin::Closed,
            wait_for_full_bucket: false,
            saturated: false,
            payload_len: 16,
            warmup: None,
        }
    }
}

impl ScenarioParams {
    /// Single link with success probability `r`.
    pub fn with_rate(mut self, r: f64) -> Self {
        self.network = ErasureNetwork::Single(1.0 - r);
        self
    }

    pub fn rate(&self) -> Result<f64, ScenarioError> {
        Ok(end_to_end_rate(&self.network, self.bucket)?)
    }

    pub fn service_model(&self) -> Result<ServiceModel<f64>, ScenarioError> {
        Ok(ServiceModel::new(self.rate()?, self.packet_len, self.feedback_delay, self.bucket)?)
    }

    /// Admitted arrival probability λ.
    pub fn lambda(&self) -> Result<f64, ScenarioError> {
        match self.load {
            Load::Lambda(l) => Ok(l),
            Load::Rho(rho) if rho >= 1.0 => Err(AnalyticsError::Unstable { rho }.into()),
            Load::Rho(rho) => Ok(lambda_for_utilization(rho, &self.service_model()?)?),
        }
    }

    pub fn traffic(&self) -> Result<TrafficSpec<f64>, ScenarioError> {
        let lambda = self.lambda()?;
        Ok(TrafficSpec::new(lambda / self.beta, self.beta)?)
    }

    pub fn utilization(&self) -> Result<f64, ScenarioError> {
        Ok(self.service_model()?.utilization(self.lambda()?))
    }

    /// Warmup slots discarded from every metric.
    pub fn warmup_slots(&self) -> u64 {
        self.warmup.unwrap_or_else(|| default_warmup(self.horizon))
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let invalid = |m: &str| Err(ScenarioError::Invalid(m.to_string()));
        if self.bucket == 0 {
            return invalid("K must be at least 1");
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return invalid("beta must lie in (0, 1]");
        }
        if !(self.packet_len > 0.0 && self.packet_len.is_finite()) {
            return invalid("L must be positive");
        }
        if !(self.feedback_delay >= 0.0 && self.feedback_delay.is_finite()) {
            return invalid("D must be non-negative");
        }
        match self.load {
            Load::Lambda(l) if !(0.0..1.0).contains(&l) => return invalid("lambda must lie in [0, 1)"),
            Load::Rho(r) if !(r > 0.0 && r.is_finite()) => return invalid("rho must be positive"),
            _ => {}
        }
        if self.beta < 1.0 {
            if let Load::Lambda(l) = self.load {
                if l / self.beta > 1.0 {
                    return invalid("lambda / beta exceeds 1");
                }
            }
        }
        if !self.field_order.is_power_of_two() || !(2..=1 << 16).contains(&self.field_order) {
            return invalid("q must be a power of two between 2 and 65536");
        }
        if self.replications == 0 {
            return invalid("replications must be at least 1");
        }
        self.network.validate()?;
        Ok(())
    }
}

pub fn default_warmup(horizon: u64) -> u64 {
    (horizon / 20).max(1_000)
}
