//! Seed substream derivation.
//!
//! Every random decision in the pipeline draws from a ChaCha stream seeded
//! by `substream(master, label, index)`. The derivation is a fixed
//! FNV-1a/splitmix64 hash, so "map 17 of the evaluate run" always sees the
//! same bytes regardless of platform, thread count, or execution order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(GOLDEN);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from `(master, label, index)`.
///
/// Documented scheme: FNV-1a over the label bytes xor'd into the master,
/// then one splitmix64 mix with the golden-ratio-scaled index.
pub fn substream(master: u64, label: &str, index: u64) -> u64 {
    let mut h = FNV_OFFSET ^ master;
    for b in label.bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(FNV_PRIME);
    }
    splitmix64(h ^ index.wrapping_mul(GOLDEN))
}

/// ChaCha stream for a named substream.
pub fn stream(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream(master, label, index))
}
