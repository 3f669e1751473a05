//! Seeded substreams and deterministic batch execution.
//!
//! Every stochastic routine splits its trials into fixed-size batches. Batch `i`
//! draws from `ChaCha8Rng::seed_from_u64(seed)` with stream `tag << 40 | i`, so the
//! result depends only on `(seed, trials)` and never on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type Rng = ChaCha8Rng;

/// Trials per batch.
pub const BATCH: usize = 4096;

/// Stream namespaces so that different stages of one operation never share randomness.
pub mod tag {
    pub const CONE: u64 = 1;
    pub const VOLUME: u64 = 2;
    pub const PARTITION: u64 = 3;
    pub const PADDING: u64 = 4;
    pub const OVERLAP: u64 = 5;
    pub const RESTART: u64 = 6;
    pub const GAUSS: u64 = 7;
    pub const HIT_AND_RUN: u64 = 8;
    pub const SPHERE: u64 = 9;
    pub const EXTENSION: u64 = 10;
    pub const SCAN: u64 = 11;
    pub const EVAL: u64 = 12;
    pub const PILOT: u64 = 13;
}

pub fn substream(seed: u64, tag: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 40) | (index & ((1 << 40) - 1)));
    rng
}

/// Derive a child seed, used when one operation calls another stochastic operation.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Split `trials` into batches, run `f(rng, batch_len, batch_index)` on each and
/// return the per-batch results in batch order.
pub fn run_batches<T, F>(seed: u64, tag: u64, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut Rng, usize, usize) -> T + Sync,
{
    let batches = trials.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let len = if b + 1 == batches {
                trials - b * BATCH
            } else {
                BATCH
            };
            let mut rng = substream(seed, tag, b as u64);
            f(&mut rng, len, b)
        })
        .collect()
}

/// Run `f` on a dedicated pool with `workers` threads (0 keeps the global pool).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
