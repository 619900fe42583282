//! Configuration, sweeps, figure reproduction and CSV output.

pub mod config;
pub mod report;
pub mod reproduce;
pub mod simulate;
pub mod sweep;
pub mod table;

use std::path::PathBuf;

use thiserror::Error;

use crate::analytics::AnalyticsError;
use crate::scenario::ScenarioError;
use crate::sim::SimError;
use crate::topology::TopologyError;

pub use config::{apply_overrides, apply_seed_env, parse_config, parse_config_str, ConfigError};
pub use report::{analyze, waterfill};
pub use reproduce::{reproduce, reproduce_to, Overlay, Target};
pub use simulate::{simulate, Level};
pub use sweep::{run_sweep, SweepMode, SweepSpec};
pub use table::{fmt6, Table};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error on {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl From<AnalyticsError> for ExperimentError {
    fn from(e: AnalyticsError) -> Self {
        ExperimentError::Scenario(e.into())
    }
}

impl From<TopologyError> for ExperimentError {
    fn from(e: TopologyError) -> Self {
        ExperimentError::Scenario(e.into())
    }
}

impl From<std::io::Error> for ExperimentError {
    fn from(e: std::io::Error) -> Self {
        ExperimentError::Io(PathBuf::from("-"), e)
    }
}

fn scenario_code(e: &ScenarioError) -> i32 {
    match e {
        ScenarioError::Analytics(AnalyticsError::Unstable { .. } | AnalyticsError::Domain { .. }) => 3,
        ScenarioError::Topology(TopologyError::Infeasible) => 3,
        _ => 2,
    }
}

impl ExperimentError {
    /// 2 configuration, 3 stability or infeasibility, 4 I/O, 1 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(ConfigError::Io { .. }) => 4,
            ExperimentError::Config(ConfigError::Invalid(e)) => scenario_code(e),
            ExperimentError::Config(_) | ExperimentError::Usage(_) => 2,
            ExperimentError::Scenario(e) => scenario_code(e),
            ExperimentError::Sim(SimError::Scenario(e)) => scenario_code(e),
            ExperimentError::Sim(SimError::Unstable { .. }) => 3,
            ExperimentError::Sim(SimError::DecodeMismatch { .. } | SimError::Aoi(_) | SimError::Codec(_)) => 1,
            ExperimentError::Sim(_) => 2,
            ExperimentError::Io(..) | ExperimentError::Csv(_) => 4,
        }
    }
}
