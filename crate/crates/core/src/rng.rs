//! Reproducible randomness.
//!
//! Every randomized operation takes a `u64` seed and addresses trials by
//! index: trial `t` runs on the ChaCha substream `t` of the seeded generator
//! (ChaCha is counter-based, so substreams are independent and cheap to
//! position). Serial and parallel runs therefore produce identical results
//! for the same seed, regardless of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Generator for one addressed trial: stream = trial index.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Generator for a single-run command (trial 0 of the seed).
pub fn run_rng(seed: u64) -> TrialRng {
    trial_rng(seed, 0)
}
