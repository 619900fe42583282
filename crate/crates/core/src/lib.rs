//! Age of Information of adaptive random linear network coding with a
//! coding bucket over erasure networks.
//!
//! The numeric core is generic over [`scalar::Real`]; the aliases below fix
//! it to `f64` or `f32`. Simulation and experiment drivers work in `f64`.

pub mod analytics;
pub mod codec;
pub mod experiments;
pub mod field;
pub mod scalar;
pub mod scenario;
pub mod sim;
pub mod topology;

pub use analytics::{AnalyticsError, Coupling};
pub use codec::{CodecError, CodedPacket, DecoderState, SourcePacket};
pub use field::{FieldSpec, GaloisField};
pub use scenario::{BucketJoin, Load, ScenarioError, ScenarioParams};
pub use sim::{RunMetrics, SimError};
pub use topology::TopologyError;

pub type ServiceModelF64 = analytics::ServiceModel<f64>;
pub type ServiceModelF32 = analytics::ServiceModel<f32>;
pub type TrafficSpecF64 = analytics::TrafficSpec<f64>;
pub type TrafficSpecF32 = analytics::TrafficSpec<f32>;
pub type AoiResultF64 = analytics::AoiResult<f64>;
pub type AoiResultF32 = analytics::AoiResult<f32>;
pub type ErasureNetworkF64 = topology::ErasureNetwork<f64>;
pub type ErasureNetworkF32 = topology::ErasureNetwork<f32>;
pub type PathAllocationF64 = topology::PathAllocation<f64>;
pub type PathAllocationF32 = topology::PathAllocation<f32>;
