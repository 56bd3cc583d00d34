//! Counter-keyed random streams.
//!
//! Every randomized operation derives an independent ChaCha stream from
//! `(seed, domain, index)`, where `index` is usually a sample's position in
//! the output stream. Work can therefore be split across threads in any way
//! and the generated stream stays bit-identical to the sequential one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keep streams used for different purposes independent even
/// when callers reuse a seed.
pub(crate) mod domain {
    pub const BOOL_INPUTS: u64 = 0x01;
    pub const TRAJECTORY_ERRORS: u64 = 0x03;
    pub const TRAJECTORY_SHOTS: u64 = 0x04;
    pub const CORRUPTION: u64 = 0x05;
    pub const RANDOM_WALK: u64 = 0x06;
    pub const CIRCUIT: u64 = 0x07;
    pub const SPLITS: u64 = 0x08;
    pub const DISTRIBUTION_SHOTS: u64 = 0x09;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for item `index` of stream `domain` under `seed`.
pub fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let key = splitmix64(seed ^ splitmix64(domain.wrapping_mul(0xA24B_AED4_963E_E407)));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}
