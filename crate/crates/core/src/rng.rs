//! Seeded, counter-addressed random streams.
//!
//! Every consumer derives a ChaCha8 stream from `(seed, stream id)`, so a
//! block of work can be regenerated independently of how the blocks were
//! scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream identifiers keep unrelated consumers of one seed apart.
pub mod stream {
    pub const DENSITY: u64 = 1 << 40;
    pub const PAIRS: u64 = 2 << 40;
    pub const CLOUD: u64 = 3 << 40;
}

/// A generator positioned at the start of stream `stream` for `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
