//! Reproducible random streams.
//!
//! Every run draws from ChaCha8 (`rand_chacha::ChaCha8Rng`), whose output is
//! specified bit-for-bit and platform independent. The per-run seed is
//!
//! ```text
//! seed = splitmix64(splitmix64(splitmix64(base) ^ scenario) ^ replication)
//! ```
//!
//! where `splitmix64` is the standard SplitMix64 output function (golden
//! ratio increment followed by the 30/27/31 xor-shift-multiply finalizer).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run_seed(base: u64, scenario: u64, replication: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ scenario) ^ replication)
}

pub fn sim_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
