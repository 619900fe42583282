//! Maximum feasible end-to-end rate of erasure networks.
//!
//! A tandem of links is limited by its weakest link (min-cut). Parallel
//! paths are combined by splitting each bucket of `K` packets across paths
//! so that the slowest path finishes as early as possible.

use thiserror::Error;

use crate::scalar::Real;

/// Largest bucket accepted by [`waterfill_bruteforce`].
pub const BRUTEFORCE_MAX_BUCKET: u32 = 14;
/// Largest path count accepted by [`waterfill_bruteforce`].
pub const BRUTEFORCE_MAX_PATHS: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("erasure probability {0} outside [0, 1]")]
    Erasure(f64),
    #[error("a chain needs at least one link")]
    EmptyChain,
    #[error("a multipath network needs at least one path")]
    NoPaths,
    #[error("bucket size must be at least 1")]
    EmptyBucket,
    #[error("no path can deliver packets")]
    Infeasible,
    #[error("exhaustive search limited to K <= {BRUTEFORCE_MAX_BUCKET} and at most {BRUTEFORCE_MAX_PATHS} paths")]
    TooLarge,
}

/// Erasure network between one source and one destination.
#[derive(Debug, Clone, PartialEq)]
pub enum ErasureNetwork<T> {
    /// One link with erasure probability ε.
    Single(T),
    /// Links in tandem, relays recode and forward.
    Multihop(Vec<T>),
    /// Disjoint paths, each a tandem chain.
    Multipath(Vec<Vec<T>>),
}

impl<T: Real> ErasureNetwork<T> {
    /// Relayed path over two links plus a direct link.
    pub fn three_node(relay_in: T, relay_out: T, direct: T) -> Self {
        Self::Multipath(vec![vec![relay_in, relay_out], vec![direct]])
    }

    /// Every topology viewed as a list of chains.
    pub fn paths(&self) -> Vec<Vec<T>> {
        match self {
            Self::Single(e) => vec![vec![*e]],
            Self::Multihop(chain) => vec![chain.clone()],
            Self::Multipath(paths) => paths.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), TopologyError> {
        let paths = self.paths();
        if paths.is_empty() {
            return Err(TopologyError::NoPaths);
        }
        for chain in &paths {
            check_chain(chain)?;
        }
        Ok(())
    }
}

fn check_chain<T: Real>(chain: &[T]) -> Result<(), TopologyError> {
    if chain.is_empty() {
        return Err(TopologyError::EmptyChain);
    }
    for &e in chain {
        if !(e >= T::zero() && e <= T::one()) {
            return Err(TopologyError::Erasure(e.to_f64().unwrap_or(f64::NAN)));
        }
    }
    Ok(())
}

/// `min_h (1 - ε_h)`; a severed link gives rate 0.
pub fn min_cut_rate<T: Real>(chain: &[T]) -> Result<T, TopologyError> {
    check_chain(chain)?;
    Ok(chain.iter().map(|&e| T::one() - e).fold(T::one(), T::min))
}

/// Integer split of a bucket over paths.
#[derive(Debug, Clone, PartialEq)]
pub struct PathAllocation<T> {
    /// Packets assigned to each path, summing to `K`.
    pub counts: Vec<u32>,
    /// `max_j k_j / (1 - ε_j)` over paths that carry packets.
    pub finish_time: T,
    /// `K / finish_time`.
    pub rate: T,
}

fn finish_time<T: Real>(counts: &[u32], rates: &[T]) -> T {
    counts
        .iter()
        .zip(rates)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &r)| T::from_count(c) / r)
        .fold(T::zero(), T::max)
}

fn check_rates<T: Real>(k: u32, rates: &[T]) -> Result<(), TopologyError> {
    if k == 0 {
        return Err(TopologyError::EmptyBucket);
    }
    if rates.is_empty() {
        return Err(TopologyError::NoPaths);
    }
    if !rates.iter().any(|&r| r > T::zero()) {
        return Err(TopologyError::Infeasible);
    }
    Ok(())
}

fn allocation<T: Real>(k: u32, counts: Vec<u32>, rates: &[T]) -> PathAllocation<T> {
    let finish_time = finish_time(&counts, rates);
    PathAllocation { rate: T::from_count(k) / finish_time, counts, finish_time }
}

/// Discrete water filling: each packet goes to the path whose finish time
/// after taking it is smallest, lowest index on ties.
pub fn waterfill_alloc<T: Real>(k: u32, path_rates: &[T]) -> Result<PathAllocation<T>, TopologyError> {
    check_rates(k, path_rates)?;
    let mut counts = vec![0u32; path_rates.len()];
    for _ in 0..k {
        let mut best: Option<(usize, T)> = None;
        for (j, &r) in path_rates.iter().enumerate() {
            if r <= T::zero() {
                continue;
            }
            let t = T::from_count(counts[j] + 1) / r;
            if best.is_none_or(|(_, bt)| t < bt) {
                best = Some((j, t));
            }
        }
        let (j, _) = best.expect("at least one positive rate");
        counts[j] += 1;
    }
    Ok(allocation(k, counts, path_rates))
}

/// Exhaustive minimum of the finish time over all splits.
pub fn waterfill_bruteforce<T: Real>(k: u32, path_rates: &[T]) -> Result<PathAllocation<T>, TopologyError> {
    check_rates(k, path_rates)?;
    if k > BRUTEFORCE_MAX_BUCKET || path_rates.len() > BRUTEFORCE_MAX_PATHS {
        return Err(TopologyError::TooLarge);
    }
    fn visit<T: Real>(j: usize, left: u32, counts: &mut Vec<u32>, rates: &[T], best: &mut Option<(T, Vec<u32>)>) {
        if j + 1 == rates.len() {
            if left > 0 && rates[j] <= T::zero() {
                return;
            }
            counts[j] = left;
            let t = finish_time(counts, rates);
            if best.as_ref().is_none_or(|(bt, _)| t < *bt) {
                *best = Some((t, counts.clone()));
            }
            counts[j] = 0;
            return;
        }
        let most = if rates[j] > T::zero() { left } else { 0 };
        for c in 0..=most {
            counts[j] = c;
            visit(j + 1, left - c, counts, rates, best);
        }
        counts[j] = 0;
    }
    let mut best = None;
    visit(0, k, &mut vec![0; path_rates.len()], path_rates, &mut best);
    let (_, counts) = best.ok_or(TopologyError::Infeasible)?;
    Ok(allocation(k, counts, path_rates))
}

/// Per-path chain rates of a network.
pub fn path_rates<T: Real>(net: &ErasureNetwork<T>) -> Result<Vec<T>, TopologyError> {
    net.validate()?;
    net.paths().iter().map(|c| min_cut_rate(c)).collect()
}

/// Maximum feasible end-to-end rate `r` for a bucket of `k` packets.
///
/// Parallel paths can yield `r > 1`.
pub fn end_to_end_rate<T: Real>(net: &ErasureNetwork<T>, k: u32) -> Result<T, TopologyError> {
    let rate = match net {
        ErasureNetwork::Single(e) => min_cut_rate(&[*e])?,
        ErasureNetwork::Multihop(chain) => min_cut_rate(chain)?,
        ErasureNetwork::Multipath(_) => {
            let rates = path_rates(net)?;
            check_rates(k, &rates)?;
            waterfill_alloc(k, &rates)?.rate
        }
    };
    if rate <= T::zero() {
        return Err(TopologyError::Infeasible);
    }
    Ok(rate)
}
