//! One-axis parameter sweeps over a bounded worker pool.

use std::path::PathBuf;

use rayon::prelude::*;

use super::config::{set, SetError};
use super::report::{analyze_row, ANALYZE_COLUMNS};
use super::simulate::{run_replications, sim_rows, Level, SIM_COLUMNS};
use super::table::Table;
use super::ExperimentError;
use crate::scenario::ScenarioParams;

/// Parameters that can be swept.
pub const AXES: [&str; 8] = ["lambda", "rho", "beta", "K", "L", "D", "r", "q"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ScenarioParams,
    pub axis: String,
    pub values: Vec<f64>,
    pub output: Option<PathBuf>,
}

/// What is evaluated at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Analytic,
    Simulate(Level),
}

impl SweepSpec {
    /// Scenario at each axis value, in order.
    pub fn points(&self) -> Result<Vec<ScenarioParams>, ExperimentError> {
        if !AXES.contains(&self.axis.as_str()) {
            return Err(ExperimentError::Usage(format!(
                "unknown sweep axis `{}`, expected one of {}",
                self.axis,
                AXES.join(", ")
            )));
        }
        self.values
            .iter()
            .map(|&v| {
                let mut p = self.base.clone();
                set(&mut p, &self.axis, &v.to_string()).map_err(|e| match e {
                    SetError::Unknown => ExperimentError::Usage(format!("unknown axis {}", self.axis)),
                    SetError::Bad(m) => ExperimentError::Usage(format!("{} = {v}: {m}", self.axis)),
                })?;
                p.validate()?;
                Ok(p)
            })
            .collect()
    }
}

/// Evaluates every point on at most `jobs` threads; rows keep axis order.
pub fn run_sweep(spec: &SweepSpec, mode: SweepMode, jobs: usize) -> Result<Table, ExperimentError> {
    let points = spec.points()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ExperimentError::Usage(e.to_string()))?;
    let columns: Vec<&str> = match mode {
        SweepMode::Analytic => ANALYZE_COLUMNS.to_vec(),
        SweepMode::Simulate(_) => SIM_COLUMNS.to_vec(),
    };
    let header: Vec<&str> = ["axis", "value"].into_iter().chain(columns).collect();

    let blocks: Vec<Vec<Vec<String>>> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| match mode {
                SweepMode::Analytic => Ok(vec![analyze_row(p)?]),
                SweepMode::Simulate(level) => {
                    let runs = run_replications(p, level, i as u64)?;
                    Ok(sim_rows(p, level, &runs))
                }
            })
            .collect::<Result<_, ExperimentError>>()
    })?;

    let mut t = Table::new(&header);
    for (v, rows) in spec.values.iter().zip(blocks) {
        for r in rows {
            let mut full = vec![spec.axis.clone(), v.to_string()];
            full.extend(r);
            t.push(full);
        }
    }
    Ok(t)
}
