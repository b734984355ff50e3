//! Deterministic random streams.
//!
//! Every randomized experiment draws from `stream(seed, name)`: a ChaCha8
//! generator keyed by the global seed, with the ChaCha stream id set to the
//! FNV-1a hash of the experiment name. Streams for different names never
//! overlap and adding a new experiment never perturbs an existing one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn fnv1a(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(name));
    rng
}
