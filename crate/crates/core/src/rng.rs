//! Seed derivation for reproducible, order-independent random streams.
//!
//! Every random stream is keyed by `(master seed, label, index)`, so the value a
//! block or particle sees does not depend on scheduling or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DATA: u64 = 0x6461_7461;
pub const CHANNEL: u64 = 0x6368_616e;
pub const SLM: u64 = 0x736c_6d00;
pub const PSO: u64 = 0x7073_6f00;
pub const TRIAL: u64 = 0x7472_6961;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, label: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ label) ^ index)
}

pub fn stream(seed: u64, label: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, label, index))
}
