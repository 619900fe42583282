//! Analytic curves for the standard figures and the reduction table, with
//! optional queue-level simulation overlays.

use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use super::table::{fmt6, opt6, Table};
use super::ExperimentError;
use crate::analytics::{aaoi_reduction, evaluate, lambda_for_utilization, Coupling, ServiceModel, TrafficSpec};
use crate::scenario::{Load, ScenarioParams};
use crate::sim::run_queue_sim;
use crate::sim::stats::mean_and_se;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Table1,
}

impl Target {
    pub const ALL: [Target; 6] = [Target::Fig3, Target::Fig4, Target::Fig5, Target::Fig6, Target::Fig7, Target::Table1];

    pub fn name(&self) -> &'static str {
        match self {
            Target::Fig3 => "fig3",
            Target::Fig4 => "fig4",
            Target::Fig5 => "fig5",
            Target::Fig6 => "fig6",
            Target::Fig7 => "fig7",
            Target::Table1 => "table1",
        }
    }
}

impl FromStr for Target {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown target `{s}`"))
    }
}

/// Simulation overlay settings; `None` in [`reproduce`] means analytic only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlay {
    pub horizon: u64,
    pub replications: u32,
    pub base_seed: u64,
}

/// Reference reductions checked by the `table1` target, indexed
/// `[(K, D) row][r column]` with rows (2,1), (2,5), (10,1), (10,5) and
/// columns r = 0.25, 0.5, 0.75, 1.0.
pub const REFERENCE_REDUCTIONS: [[f64; 4]; 4] = [
    [1.87, 1.13, 0.88, 0.76],
    [4.95, 4.21, 3.99, 3.89],
    [3.91, 2.99, 2.77, 2.69],
    [13.95, 13.46, 13.38, 13.36],
];
pub const TABLE1_ROWS: [(u32, f64); 4] = [(2, 1.0), (2, 5.0), (10, 1.0), (10, 5.0)];
pub const TABLE1_RATES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

/// Utilization used by every figure except where it is the swept axis.
pub const DEFAULT_RHO: f64 = 0.6;

const OVERLAY_COLUMNS: [&str; 2] = ["sim_avg_aoi", "sim_avg_aoi_se"];

fn model(k: u32, d: f64, r: f64) -> Result<ServiceModel<f64>, ExperimentError> {
    Ok(ServiceModel::new(r, 1.0, d, k)?)
}

/// (λ, A_A, A_P) at utilization `rho`.
fn point(m: &ServiceModel<f64>, rho: f64) -> Result<(f64, f64, f64), ExperimentError> {
    let lambda = lambda_for_utilization(rho, m)?;
    let a = evaluate(&TrafficSpec::admitted(lambda)?, m)?;
    Ok((lambda, a.avg_aoi, a.peak_aoi))
}

struct Curve {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    /// Scenario behind each row, for overlays.
    scenarios: Vec<ScenarioParams>,
}

fn scenario(k: u32, d: f64, r: f64, rho: f64) -> ScenarioParams {
    ScenarioParams { load: Load::Rho(rho), bucket: k, feedback_delay: d, ..Default::default() }.with_rate(r)
}

fn fig3() -> Result<Curve, ExperimentError> {
    let mut c = Curve { header: vec!["K", "rho", "lambda", "avg_aoi", "peak_aoi"], rows: vec![], scenarios: vec![] };
    for k in [1, 2, 5, 10] {
        let m = model(k, 1.0, 0.8)?;
        for i in 1..100 {
            let rho = i as f64 / 100.0;
            let (l, a, p) = point(&m, rho)?;
            c.rows.push(vec![k.to_string(), fmt6(rho), fmt6(l), fmt6(a), fmt6(p)]);
            c.scenarios.push(scenario(k, 1.0, 0.8, rho));
        }
    }
    Ok(c)
}

fn fig4() -> Result<Curve, ExperimentError> {
    let mut c = Curve { header: vec!["rho", "K", "lambda", "avg_aoi", "peak_aoi"], rows: vec![], scenarios: vec![] };
    for rho in [0.2, 0.6, 0.9] {
        for k in 1..=50 {
            let (l, a, p) = point(&model(k, 1.0, 0.8)?, rho)?;
            c.rows.push(vec![fmt6(rho), k.to_string(), fmt6(l), fmt6(a), fmt6(p)]);
            c.scenarios.push(scenario(k, 1.0, 0.8, rho));
        }
    }
    Ok(c)
}

fn fig5() -> Result<Curve, ExperimentError> {
    let mut c = Curve { header: vec!["D", "K", "throughput", "avg_aoi", "d_inf"], rows: vec![], scenarios: vec![] };
    for d in [1.0, 5.0] {
        for k in 1..=50 {
            let m = model(k, d, 0.8)?;
            let (_, a, _) = point(&m, DEFAULT_RHO)?;
            c.rows.push(vec![
                fmt6(d),
                k.to_string(),
                fmt6(m.throughput()),
                fmt6(a),
                fmt6(m.delay_cost(f64::INFINITY)?),
            ]);
            c.scenarios.push(scenario(k, d, 0.8, DEFAULT_RHO));
        }
    }
    Ok(c)
}

fn fig6() -> Result<Curve, ExperimentError> {
    let mut c = Curve { header: vec!["K", "D", "lambda", "avg_aoi", "peak_aoi"], rows: vec![], scenarios: vec![] };
    for k in [1, 2, 10] {
        for d in 0..=20 {
            let d = d as f64;
            let (l, a, p) = point(&model(k, d, 0.8)?, DEFAULT_RHO)?;
            c.rows.push(vec![k.to_string(), fmt6(d), fmt6(l), fmt6(a), fmt6(p)]);
            c.scenarios.push(scenario(k, d, 0.8, DEFAULT_RHO));
        }
    }
    Ok(c)
}

/// `reduction_vs_k1` is `A_A(K=1) - A_A(K)` at equal utilization.
fn fig7() -> Result<Curve, ExperimentError> {
    let d = 5.0;
    let mut c = Curve {
        header: vec!["K", "r", "lambda", "avg_aoi", "throughput", "reduction_vs_k1"],
        rows: vec![],
        scenarios: vec![],
    };
    for k in [1, 2, 10] {
        for i in 1..=100 {
            let r = i as f64 / 100.0;
            let m = model(k, d, r)?;
            let (l, a, _) = point(&m, DEFAULT_RHO)?;
            let red = if k == 1 { 0.0 } else { aaoi_reduction(k, d, r, DEFAULT_RHO, Coupling::FixedUtilization)? };
            c.rows.push(vec![k.to_string(), fmt6(r), fmt6(l), fmt6(a), fmt6(m.throughput()), fmt6(red)]);
            c.scenarios.push(scenario(k, d, r, DEFAULT_RHO));
        }
    }
    Ok(c)
}

pub const TABLE1_COLUMNS: [&str; 9] = [
    "K",
    "D",
    "r",
    "reference",
    "fixed_utilization",
    "fixed_arrival_rate",
    "matched_convention",
    "matched_value",
    "abs_error",
];

/// Reduction table under both couplings; `matched_convention` is the one
/// closer to the reference value.
pub fn table1() -> Result<Table, ExperimentError> {
    let mut t = Table::new(&TABLE1_COLUMNS);
    for (i, &(k, d)) in TABLE1_ROWS.iter().enumerate() {
        for (j, &r) in TABLE1_RATES.iter().enumerate() {
            let reference = REFERENCE_REDUCTIONS[i][j];
            let fu = aaoi_reduction(k, d, r, DEFAULT_RHO, Coupling::FixedUtilization)?;
            let fa = aaoi_reduction(k, d, r, DEFAULT_RHO, Coupling::FixedArrivalRate)?;
            let (conv, val) = if (fu - reference).abs() <= (fa - reference).abs() {
                (Coupling::FixedUtilization, fu)
            } else {
                (Coupling::FixedArrivalRate, fa)
            };
            t.push(vec![
                k.to_string(),
                fmt6(d),
                fmt6(r),
                fmt6(reference),
                fmt6(fu),
                fmt6(fa),
                conv.name().into(),
                fmt6(val),
                fmt6((val - reference).abs()),
            ]);
        }
    }
    Ok(t)
}

fn overlay_cells(p: &ScenarioParams, o: &Overlay, index: u64) -> Vec<String> {
    let p = ScenarioParams { horizon: o.horizon, replications: o.replications, base_seed: o.base_seed, ..p.clone() };
    let runs: Result<Vec<_>, _> = (0..o.replications as u64)
        .map(|rep| run_queue_sim(&p, p.horizon, crate::sim::run_seed(p.base_seed, index, rep)))
        .collect();
    match runs {
        Ok(runs) if runs.len() == 1 => vec![fmt6(runs[0].avg_aoi), fmt6(runs[0].avg_aoi_se)],
        Ok(runs) => {
            let (m, se) = mean_and_se(&runs.iter().map(|r| r.avg_aoi).collect::<Vec<_>>());
            vec![fmt6(m), fmt6(se)]
        }
        // points the queue model cannot run stay blank
        Err(_) => vec![opt6(None), opt6(None)],
    }
}

/// Builds the table for `target`.
pub fn reproduce(target: Target, overlay: Option<Overlay>) -> Result<Table, ExperimentError> {
    let curve = match target {
        Target::Fig3 => fig3()?,
        Target::Fig4 => fig4()?,
        Target::Fig5 => fig5()?,
        Target::Fig6 => fig6()?,
        Target::Fig7 => fig7()?,
        Target::Table1 => return table1(),
    };
    let mut header = curve.header.clone();
    let extra: Vec<Vec<String>> = match overlay {
        Some(o) => {
            header.extend(OVERLAY_COLUMNS);
            curve
                .scenarios
                .par_iter()
                .enumerate()
                .map(|(i, p)| overlay_cells(p, &o, i as u64))
                .collect()
        }
        None => vec![Vec::new(); curve.rows.len()],
    };
    let mut t = Table::new(&header);
    for (mut row, cells) in curve.rows.into_iter().zip(extra) {
        row.extend(cells);
        t.push(row);
    }
    Ok(t)
}

/// Writes `<target>.csv` into `outdir` and returns the path.
pub fn reproduce_to(target: Target, overlay: Option<Overlay>, outdir: &Path) -> Result<std::path::PathBuf, ExperimentError> {
    std::fs::create_dir_all(outdir).map_err(|e| ExperimentError::Io(outdir.to_path_buf(), e))?;
    let path = outdir.join(format!("{}.csv", target.name()));
    reproduce(target, overlay)?.write_path(&path)?;
    Ok(path)
}
