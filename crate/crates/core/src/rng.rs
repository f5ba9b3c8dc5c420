//! Seeded, stream-split random number generators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for `(seed, stream)`; distinct streams never overlap, so
/// per-sample work can be split by index and stay reproducible.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
