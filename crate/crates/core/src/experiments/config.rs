//! Flat `key = value` scenario files.
//!
//! ```text
//! # comment
//! rho = 0.6
//! K = 10
//! network = multipath:0.2,0.1|0.5
//! ```
//!
//! Keys: `lambda`, `rho`, `beta`, `K`, `L`, `D`, `r`, `network`, `q`,
//! `horizon`, `replications`, `seed`, `bucket_join`, `wait_for_full_bucket`,
//! `saturated`, `payload_len`, `warmup`. `lambda` and `rho` are exclusive,
//! as are `r` and `network`. Networks list erasure probabilities:
//! `single:e`, `multihop:e1,e2,...`, `multipath:e11,e12|e21|...`.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::scenario::{BucketJoin, Load, ScenarioError, ScenarioParams};
use crate::topology::ErasureNetwork;

/// Environment variable that overrides `seed`.
pub const SEED_ENV: &str = "SEED";

pub const KEYS: [&str; 17] = [
    "lambda",
    "rho",
    "beta",
    "K",
    "L",
    "D",
    "r",
    "network",
    "q",
    "horizon",
    "replications",
    "seed",
    "bucket_join",
    "wait_for_full_bucket",
    "saturated",
    "payload_len",
    "warmup",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value `{value}` for `{key}`: {reason}")]
    Value { line: usize, key: String, value: String, reason: String },
    #[error("`{0}` and `{1}` are mutually exclusive")]
    Conflict(&'static str, &'static str),
    #[error("bad {SEED_ENV} environment value `{0}`")]
    SeedEnv(String),
    #[error(transparent)]
    Invalid(#[from] ScenarioError),
}

pub fn parse_config(path: &Path) -> Result<ScenarioParams, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ScenarioParams, ConfigError> {
    let pairs = text
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let line = raw.split('#').next().unwrap_or("").trim();
            (!line.is_empty()).then_some((i + 1, line))
        })
        .map(|(i, line)| match line.split_once('=') {
            Some((k, v)) => Ok((i, k.trim().to_string(), v.trim().to_string())),
            None => Err(ConfigError::Syntax { line: i }),
        })
        .collect::<Result<Vec<_>, _>>()?;
    build(ScenarioParams::default(), &pairs)
}

/// Applies `key=value` overrides, numbered from line 0, on top of `base`.
pub fn apply_overrides(base: ScenarioParams, sets: &[String]) -> Result<ScenarioParams, ConfigError> {
    let pairs = sets
        .iter()
        .map(|s| match s.split_once('=') {
            Some((k, v)) => Ok((0, k.trim().to_string(), v.trim().to_string())),
            None => Err(ConfigError::Syntax { line: 0 }),
        })
        .collect::<Result<Vec<_>, _>>()?;
    build(base, &pairs)
}

/// Replaces the base seed with `$SEED` when it is set.
pub fn apply_seed_env(mut params: ScenarioParams) -> Result<ScenarioParams, ConfigError> {
    if let Ok(v) = std::env::var(SEED_ENV) {
        params.base_seed = v.trim().parse().map_err(|_| ConfigError::SeedEnv(v))?;
    }
    Ok(params)
}

fn build(mut p: ScenarioParams, pairs: &[(usize, String, String)]) -> Result<ScenarioParams, ConfigError> {
    let has = |k: &str| pairs.iter().any(|(_, key, _)| key == k);
    if has("lambda") && has("rho") {
        return Err(ConfigError::Conflict("lambda", "rho"));
    }
    if has("r") && has("network") {
        return Err(ConfigError::Conflict("r", "network"));
    }
    for (line, key, value) in pairs {
        set(&mut p, key, value).map_err(|e| match e {
            SetError::Unknown => ConfigError::UnknownKey { line: *line, key: key.clone() },
            SetError::Bad(reason) => {
                ConfigError::Value { line: *line, key: key.clone(), value: value.clone(), reason }
            }
        })?;
    }
    p.validate()?;
    Ok(p)
}

pub(crate) enum SetError {
    Unknown,
    Bad(String),
}

fn num<T: std::str::FromStr>(v: &str) -> Result<T, SetError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| SetError::Bad(e.to_string()))
}

fn flag(v: &str) -> Result<bool, SetError> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(SetError::Bad("expected true or false".into())),
    }
}

/// Sets one parameter from its textual value.
pub(crate) fn set(p: &mut ScenarioParams, key: &str, v: &str) -> Result<(), SetError> {
    match key {
        "lambda" => p.load = Load::Lambda(num(v)?),
        "rho" => p.load = Load::Rho(num(v)?),
        "beta" => p.beta = num(v)?,
        "K" => p.bucket = num(v)?,
        "L" => p.packet_len = num(v)?,
        "D" => p.feedback_delay = num(v)?,
        "r" => {
            let r: f64 = num(v)?;
            if !(r > 0.0 && r <= 1.0) {
                return Err(SetError::Bad("link rate must lie in (0, 1]".into()));
            }
            p.network = ErasureNetwork::Single(1.0 - r);
        }
        "network" => p.network = parse_network(v).map_err(SetError::Bad)?,
        "q" => p.field_order = num(v)?,
        "horizon" => p.horizon = num(v)?,
        "replications" => p.replications = num(v)?,
        "seed" => p.base_seed = num(v)?,
        "bucket_join" => {
            p.bucket_join = match v {
                "closed" => BucketJoin::Closed,
                "open" => BucketJoin::Open,
                _ => return Err(SetError::Bad("expected open or closed".into())),
            }
        }
        "wait_for_full_bucket" => p.wait_for_full_bucket = flag(v)?,
        "saturated" => p.saturated = flag(v)?,
        "payload_len" => p.payload_len = num(v)?,
        "warmup" => p.warmup = Some(num(v)?),
        _ => return Err(SetError::Unknown),
    }
    Ok(())
}

fn erasures(list: &str) -> Result<Vec<f64>, String> {
    list.split(',').map(|e| e.trim().parse::<f64>().map_err(|e| e.to_string())).collect()
}

pub fn parse_network(spec: &str) -> Result<ErasureNetwork<f64>, String> {
    let (kind, body) = spec.split_once(':').ok_or("expected kind:erasures")?;
    let net = match kind.trim() {
        "single" => ErasureNetwork::Single(body.trim().parse::<f64>().map_err(|e| e.to_string())?),
        "multihop" => ErasureNetwork::Multihop(erasures(body)?),
        "multipath" => ErasureNetwork::Multipath(body.split('|').map(erasures).collect::<Result<_, _>>()?),
        other => return Err(format!("unknown network kind `{other}`")),
    };
    net.validate().map_err(|e| e.to_string())?;
    Ok(net)
}

pub fn format_network(net: &ErasureNetwork<f64>) -> String {
    let join = |c: &[f64]| c.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
    match net {
        ErasureNetwork::Single(e) => format!("single:{e}"),
        ErasureNetwork::Multihop(c) => format!("multihop:{}", join(c)),
        ErasureNetwork::Multipath(ps) => {
            format!("multipath:{}", ps.iter().map(|c| join(c)).collect::<Vec<_>>().join("|"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let p = parse_config_str("# nothing here\n\n").unwrap();
        assert_eq!(p, ScenarioParams::default());
    }

    #[test]
    fn full_file() {
        let p = parse_config_str(
            "lambda = 0.3\nK = 4 # bucket\nD=5\nnetwork = multipath:0.2,0.1|0.5\nbucket_join = open\nsaturated = true\nwarmup = 10\n",
        )
        .unwrap();
        assert_eq!(p.load, Load::Lambda(0.3));
        assert_eq!(p.bucket, 4);
        assert_eq!(p.feedback_delay, 5.0);
        assert_eq!(p.network, ErasureNetwork::Multipath(vec![vec![0.2, 0.1], vec![0.5]]));
        assert_eq!(p.bucket_join, BucketJoin::Open);
        assert!(p.saturated);
        assert_eq!(p.warmup, Some(10));
        assert_eq!(parse_network(&format_network(&p.network)).unwrap(), p.network);
    }

    #[test]
    fn rejections() {
        assert!(matches!(parse_config_str("lambda = 0.3\nrho = 0.6"), Err(ConfigError::Conflict(..))));
        assert!(matches!(parse_config_str("K = 0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config_str("colour = red"), Err(ConfigError::UnknownKey { line: 1, .. })));
        assert!(matches!(parse_config_str("\nK = two"), Err(ConfigError::Value { line: 2, .. })));
        assert!(matches!(parse_config_str("K 2"), Err(ConfigError::Syntax { line: 1 })));
        assert!(parse_config_str("network = ring:0.1").is_err());
    }

    #[test]
    fn overrides() {
        let p = apply_overrides(ScenarioParams::default(), &["K=10".into(), "r = 1.0".into()]).unwrap();
        assert_eq!(p.bucket, 10);
        assert_eq!(p.network, ErasureNetwork::Single(0.0));
    }
}
