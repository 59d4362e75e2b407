//! Counter-style random streams: every (seed, experiment, trial, attempt)
//! tuple gets its own independent generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, experiment: &str, trial: u64, attempt: u32) -> StreamRng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((experiment.len() as u64).to_le_bytes());
    h.update(experiment.as_bytes());
    h.update(trial.to_le_bytes());
    h.update(attempt.to_le_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}
