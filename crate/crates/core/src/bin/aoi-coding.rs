use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aoi_coding::experiments::config::parse_network;
use aoi_coding::experiments::{
    analyze, apply_overrides, apply_seed_env, parse_config, reproduce_to, run_sweep, simulate, waterfill,
    ExperimentError, Level, Overlay, SweepMode, SweepSpec, Table, Target,
};
use aoi_coding::ScenarioParams;

#[derive(Parser)]
#[command(name = "aoi-coding", version, about = "Age of Information with adaptive network coding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Scenario {
    /// Scenario file with `key = value` lines
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Extra `key=value` settings applied after the file
    #[arg(short, long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Write CSV here instead of stdout
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form AoI, delay costs and throughput
    Analyze(Scenario),
    /// Replicated simulation runs plus a mean row
    Simulate {
        #[command(flatten)]
        scenario: Scenario,
        /// queue or protocol
        #[arg(short, long, default_value = "queue")]
        level: Level,
    },
    /// Sweep one parameter over a list of values
    Sweep {
        #[command(flatten)]
        scenario: Scenario,
        /// Parameter to vary (lambda, rho, beta, K, L, D, r, q)
        #[arg(short, long)]
        axis: String,
        /// Comma-separated values
        #[arg(short = 'V', long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// analytic, queue or protocol
        #[arg(short, long, default_value = "analytic")]
        mode: String,
        /// Worker threads
        #[arg(short, long, default_value_t = default_jobs())]
        jobs: usize,
    },
    /// Regenerate figure and table data
    Reproduce {
        /// fig3, fig4, fig5, fig6, fig7, table1 or all
        target: String,
        #[arg(short, long, default_value = "results")]
        outdir: PathBuf,
        /// Add queue-level simulation overlays to the figures
        #[arg(long)]
        simulate: bool,
        #[arg(long, default_value_t = 200_000)]
        horizon: u64,
        #[arg(long, default_value_t = 1)]
        replications: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print the water-filling split of a bucket over parallel paths
    Waterfill {
        /// Network such as `multipath:0.2|0.5,0.1`
        #[arg(short, long)]
        network: String,
        /// Bucket size
        #[arg(short, long)]
        k: u32,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn load(s: &Scenario) -> Result<ScenarioParams, ExperimentError> {
    let base = match &s.config {
        Some(path) => parse_config(path)?,
        None => ScenarioParams::default(),
    };
    Ok(apply_seed_env(apply_overrides(base, &s.sets)?)?)
}

fn emit(table: &Table, out: Option<&Path>) -> Result<(), ExperimentError> {
    match out {
        Some(path) => table.write_path(path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::Analyze(s) => emit(&analyze(&load(&s)?)?, s.out.as_deref()),
        Command::Simulate { scenario, level } => emit(&simulate(&load(&scenario)?, level)?, scenario.out.as_deref()),
        Command::Sweep { scenario, axis, values, mode, jobs } => {
            let mode = match mode.as_str() {
                "analytic" => SweepMode::Analytic,
                other => SweepMode::Simulate(other.parse().map_err(ExperimentError::Usage)?),
            };
            let spec = SweepSpec { base: load(&scenario)?, axis, values, output: scenario.out.clone() };
            emit(&run_sweep(&spec, mode, jobs)?, spec.output.as_deref())
        }
        Command::Reproduce { target, outdir, simulate, horizon, replications, seed } => {
            let targets = if target == "all" {
                Target::ALL.to_vec()
            } else {
                vec![target.parse().map_err(ExperimentError::Usage)?]
            };
            let overlay = simulate.then_some(Overlay { horizon, replications, base_seed: seed });
            for t in targets {
                let path = reproduce_to(t, overlay, &outdir)?;
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Waterfill { network, k } => {
            let net = parse_network(&network).map_err(ExperimentError::Usage)?;
            emit(&waterfill(&net, k)?, None)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
