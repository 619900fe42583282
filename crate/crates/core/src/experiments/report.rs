//! Closed-form report and water-filling printout.

use super::table::{fmt6, Table};
use super::ExperimentError;
use crate::analytics::evaluate;
use crate::scenario::ScenarioParams;
use crate::topology::{path_rates, waterfill_alloc, ErasureNetwork};

pub const ANALYZE_COLUMNS: [&str; 15] = [
    "K",
    "L",
    "D",
    "r",
    "beta",
    "lambda",
    "rho",
    "mean_service",
    "throughput",
    "mean_wait",
    "avg_aoi",
    "peak_aoi",
    "d1",
    "d2",
    "d_inf",
];

/// One analytic row for `params`.
pub fn analyze_row(params: &ScenarioParams) -> Result<Vec<String>, ExperimentError> {
    params.validate()?;
    let m = params.service_model()?;
    let t = params.traffic()?;
    let a = evaluate(&t, &m)?;
    Ok(vec![
        params.bucket.to_string(),
        fmt6(params.packet_len),
        fmt6(params.feedback_delay),
        fmt6(m.rate()),
        fmt6(params.beta),
        fmt6(t.lambda()),
        fmt6(a.utilization),
        fmt6(m.mean()),
        fmt6(a.throughput),
        fmt6(a.mean_wait),
        fmt6(a.avg_aoi),
        fmt6(a.peak_aoi),
        fmt6(m.delay_cost(1.0)?),
        fmt6(m.delay_cost(2.0)?),
        fmt6(m.delay_cost(f64::INFINITY)?),
    ])
}

pub fn analyze(params: &ScenarioParams) -> Result<Table, ExperimentError> {
    let mut t = Table::new(&ANALYZE_COLUMNS);
    t.push(analyze_row(params)?);
    Ok(t)
}

pub const WATERFILL_COLUMNS: [&str; 4] = ["path", "rate", "packets", "finish_time"];

/// Per-path split of a `k`-packet bucket, with a closing `total` row.
pub fn waterfill(net: &ErasureNetwork<f64>, k: u32) -> Result<Table, ExperimentError> {
    let rates = path_rates(net)?;
    let alloc = waterfill_alloc(k, &rates)?;
    let mut t = Table::new(&WATERFILL_COLUMNS);
    for (j, (&r, &c)) in rates.iter().zip(&alloc.counts).enumerate() {
        let finish = if c > 0 { c as f64 / r } else { 0.0 };
        t.push(vec![j.to_string(), fmt6(r), c.to_string(), fmt6(finish)]);
    }
    t.push(vec!["total".into(), fmt6(alloc.rate), k.to_string(), fmt6(alloc.finish_time)]);
    Ok(t)
}
