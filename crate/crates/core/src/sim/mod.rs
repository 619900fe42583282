//! Slotted simulation at two levels of detail: a queue-level model that
//! mirrors the analytic assumptions, and a protocol-level model that runs
//! real network coding over an erasure network.

pub mod aoi;
pub mod metrics;
pub mod protocol;
pub mod queue;
pub mod rng;
pub mod stats;

use thiserror::Error;

use crate::analytics::AnalyticsError;
use crate::codec::CodecError;
use crate::field::FieldError;
use crate::scenario::ScenarioError;
use crate::topology::TopologyError;

pub use aoi::{AoiError, AoiStep, AoiTracker, SlotClock};
pub use metrics::{empirical_dp, BucketDelivery, DelayCosts, RunMetrics};
pub use protocol::{run_protocol, run_protocol_sim, Arrivals, ProtocolConfig};
pub use queue::{run_queue, run_queue_sim, QueueConfig};
pub use rng::{run_seed, sim_rng, splitmix64, SimRng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("unstable operating point: rho = {rho}")]
    Unstable { rho: f64 },
    #[error("horizon {horizon} does not exceed warmup {warmup}")]
    HorizonTooShort { horizon: u64, warmup: u64 },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("no deliveries to measure")]
    NoDeliveries,
    #[error("generation {generation} decoded to the wrong payloads")]
    DecodeMismatch { generation: u64 },
    #[error(transparent)]
    Aoi(#[from] AoiError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<TopologyError> for SimError {
    fn from(e: TopologyError) -> Self {
        SimError::Scenario(e.into())
    }
}

impl From<AnalyticsError> for SimError {
    fn from(e: AnalyticsError) -> Self {
        SimError::Scenario(e.into())
    }
}
