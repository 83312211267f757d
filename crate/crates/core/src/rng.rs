//! Seeded random streams.
//!
//! Every run derives its streams from one `u64` seed. Each consumer gets its
//! own ChaCha stream id, so drawing more values from one stream never shifts
//! another (changing the delay distribution leaves contexts and noise alone).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream identifiers used by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Context = 1,
    Noise = 2,
    Delay = 3,
    PolicyInit = 4,
    Policy = 5,
    RewardFunction = 6,
    Analysis = 7,
}

pub fn stream(seed: u64, which: Stream) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}
