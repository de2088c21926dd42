//! Reproducible random streams.
//!
//! Every random choice in a verification run draws from a ChaCha8 stream
//! keyed by `(seed, stream)`. Stream 0 places the agent; stream `t` belongs
//! to plan step `t` (1-based), so steps never share randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const POSE_STREAM: u64 = 0;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
