//! Replicated simulation runs and their CSV rows.

use std::str::FromStr;

use rayon::prelude::*;

use super::table::{fmt6, opt6, Table};
use super::ExperimentError;
use crate::analytics::evaluate;
use crate::scenario::ScenarioParams;
use crate::sim::stats::mean_and_se;
use crate::sim::{run_protocol_sim, run_queue_sim, run_seed, RunMetrics};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Queue,
    Protocol,
}

impl Level {
    pub fn name(&self) -> &'static str {
        match self {
            Level::Queue => "queue",
            Level::Protocol => "protocol",
        }
    }
}

impl FromStr for Level {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "queue" => Ok(Level::Queue),
            "protocol" => Ok(Level::Protocol),
            _ => Err(format!("unknown level `{s}`, expected queue or protocol")),
        }
    }
}

pub const SIM_COLUMNS: [&str; 26] = [
    "level",
    "replication",
    "seed",
    "K",
    "L",
    "D",
    "r",
    "lambda",
    "rho",
    "horizon",
    "avg_aoi",
    "avg_aoi_se",
    "peak_aoi",
    "peak_aoi_se",
    "avg_aoi_raw",
    "peak_aoi_raw",
    "throughput",
    "throughput_se",
    "d1",
    "d2",
    "d_inf",
    "generations",
    "dependent",
    "analytic_avg_aoi",
    "analytic_peak_aoi",
    "analytic_throughput",
];

/// One run of `params` at `level` with an explicit seed.
pub fn run_once(params: &ScenarioParams, level: Level, seed: u64) -> Result<RunMetrics, ExperimentError> {
    Ok(match level {
        Level::Queue => run_queue_sim(params, params.horizon, seed)?,
        Level::Protocol => run_protocol_sim(params, &params.network, params.horizon, seed)?,
    })
}

/// All replications of scenario number `scenario`, in replication order.
pub fn run_replications(
    params: &ScenarioParams,
    level: Level,
    scenario: u64,
) -> Result<Vec<RunMetrics>, ExperimentError> {
    params.validate()?;
    (0..params.replications as u64)
        .into_par_iter()
        .map(|rep| run_once(params, level, run_seed(params.base_seed, scenario, rep)))
        .collect()
}

struct Analytic {
    lambda: Option<f64>,
    rho: Option<f64>,
    avg: Option<f64>,
    peak: Option<f64>,
    throughput: Option<f64>,
}

fn analytic(params: &ScenarioParams) -> Analytic {
    let m = params.service_model().ok();
    let mu = m.as_ref().map(|m| m.throughput());
    if params.saturated {
        return Analytic { lambda: None, rho: None, avg: None, peak: None, throughput: mu };
    }
    let t = params.traffic().ok();
    let a = match (&t, &m) {
        (Some(t), Some(m)) => evaluate(t, m).ok(),
        _ => None,
    };
    let lambda = t.map(|t| t.lambda());
    Analytic {
        lambda,
        rho: m.zip(lambda).map(|(m, l)| m.utilization(l)),
        avg: a.map(|a| a.avg_aoi),
        peak: a.map(|a| a.peak_aoi),
        throughput: lambda.zip(mu).map(|(l, u)| l.min(u)),
    }
}

struct Summary {
    avg: f64,
    avg_se: f64,
    peak: f64,
    peak_se: f64,
    avg_raw: f64,
    peak_raw: f64,
    throughput: f64,
    throughput_se: f64,
    d1: f64,
    d2: f64,
    d_inf: f64,
    generations: f64,
    dependent: f64,
}

impl From<&RunMetrics> for Summary {
    fn from(m: &RunMetrics) -> Self {
        Self {
            avg: m.avg_aoi,
            avg_se: m.avg_aoi_se,
            peak: m.peak_aoi,
            peak_se: m.peak_aoi_se,
            avg_raw: m.avg_aoi_raw,
            peak_raw: m.peak_aoi_raw,
            throughput: m.throughput,
            throughput_se: m.throughput_se,
            d1: m.delay_cost.d1,
            d2: m.delay_cost.d2,
            d_inf: m.delay_cost.d_inf,
            generations: m.generations_decoded as f64,
            dependent: m.dependent_packets as f64,
        }
    }
}

/// Mean over replications; standard errors across replications when there
/// are at least two, otherwise the single run's batch-means errors.
fn aggregate(runs: &[RunMetrics]) -> Summary {
    if runs.len() == 1 {
        return Summary::from(&runs[0]);
    }
    let col = |f: fn(&RunMetrics) -> f64| mean_and_se(&runs.iter().map(f).collect::<Vec<_>>());
    let (avg, avg_se) = col(|m| m.avg_aoi);
    let (peak, peak_se) = col(|m| m.peak_aoi);
    let (throughput, throughput_se) = col(|m| m.throughput);
    Summary {
        avg,
        avg_se,
        peak,
        peak_se,
        avg_raw: col(|m| m.avg_aoi_raw).0,
        peak_raw: col(|m| m.peak_aoi_raw).0,
        throughput,
        throughput_se,
        d1: col(|m| m.delay_cost.d1).0,
        d2: col(|m| m.delay_cost.d2).0,
        d_inf: col(|m| m.delay_cost.d_inf).0,
        generations: col(|m| m.generations_decoded as f64).0,
        dependent: col(|m| m.dependent_packets as f64).0,
    }
}

fn row(params: &ScenarioParams, level: Level, a: &Analytic, rep: String, seed: String, s: &Summary) -> Vec<String> {
    vec![
        level.name().into(),
        rep,
        seed,
        params.bucket.to_string(),
        fmt6(params.packet_len),
        fmt6(params.feedback_delay),
        opt6(params.rate().ok()),
        opt6(a.lambda),
        opt6(a.rho),
        params.horizon.to_string(),
        fmt6(s.avg),
        fmt6(s.avg_se),
        fmt6(s.peak),
        fmt6(s.peak_se),
        fmt6(s.avg_raw),
        fmt6(s.peak_raw),
        fmt6(s.throughput),
        fmt6(s.throughput_se),
        fmt6(s.d1),
        fmt6(s.d2),
        fmt6(s.d_inf),
        fmt6(s.generations),
        fmt6(s.dependent),
        opt6(a.avg),
        opt6(a.peak),
        opt6(a.throughput),
    ]
}

/// Replication rows followed by a `mean` row.
pub fn sim_rows(params: &ScenarioParams, level: Level, runs: &[RunMetrics]) -> Vec<Vec<String>> {
    let a = analytic(params);
    let mut rows: Vec<Vec<String>> = runs
        .iter()
        .enumerate()
        .map(|(i, m)| row(params, level, &a, i.to_string(), m.seed.to_string(), &Summary::from(m)))
        .collect();
    rows.push(row(params, level, &a, "mean".into(), String::new(), &aggregate(runs)));
    rows
}

pub fn simulate(params: &ScenarioParams, level: Level) -> Result<Table, ExperimentError> {
    let runs = run_replications(params, level, 0)?;
    let mut t = Table::new(&SIM_COLUMNS);
    for r in sim_rows(params, level, &runs) {
        t.push(r);
    }
    Ok(t)
}
