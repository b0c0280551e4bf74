//! Deterministic random streams.
//!
//! Every trial (or branching run) gets its own ChaCha8 stream keyed by the
//! master seed and selected by the trial index, so the result of trial `i`
//! does not depend on how many workers execute the batch or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// A stream for a one-off computation.
pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream number `index` under `master_seed`.
pub fn trial_rng(master_seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
