//! Seeded random-number streams.
//!
//! Every stochastic operation in this crate draws from a [`ChaCha8Rng`]
//! derived from an explicit `u64` seed. Independent sub-tasks (Monte-Carlo
//! samples, pool entries, repetitions) use [`stream`] to derive their own
//! stream from `(seed, index)`, so results do not depend on scheduling order
//! or worker count.

pub use rand_chacha::ChaCha8Rng;

use rand::SeedableRng;

/// Root RNG for a seed.
pub fn root(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
