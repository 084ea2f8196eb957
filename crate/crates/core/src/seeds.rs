//! Deterministic seed derivation and per-purpose random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a sequence of discriminators into a new seed.
/// Order matters; equal inputs always give equal outputs.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Stream ids carved out of one ChaCha8 key.
pub mod stream {
    /// Round-type schedule; public.
    pub const PUBLIC: u64 = 0;
    /// Born-rule sampling and noise draws.
    pub const NATURE: u64 = 1;
    /// Notification shares.
    pub const NOTIFY: u64 = 2;
    /// Private defection decisions of adversaries.
    pub const ADVERSARY: u64 = 3;
    /// Party `i` draws from `PARTY_BASE + i`.
    pub const PARTY_BASE: u64 = 16;
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
