//! Deterministic, splittable random streams.
//!
//! Every randomized quantity in the crate is a pure function of a `u64` seed
//! and a stream index: sample i draws from `ChaCha8Rng::seed_from_u64(seed)`
//! switched to stream i. Streams are cryptographically independent and do not
//! depend on how samples are scheduled across workers, which is what makes
//! Monte Carlo results reproducible bit-for-bit under any parallelism.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG for sample `index` of the experiment with the given seed.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
