//! Deterministic seed derivation.
//!
//! Every randomized operation takes a `u64` seed and drives a ChaCha12
//! generator, which has a stable cross-platform stream. Independent streams
//! are derived from one master seed with a SplitMix64-style mix, never by
//! reusing the master directly, so that adding a consumer cannot shift the
//! draws seen by another. The splitting rule is part of the output contract:
//! round `r` of a sweep uses `sub_seed(master, r)`, and each generator inside
//! a round uses `sub_seed(round_seed, TAG)` with the tags below.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stream tag for authorship-network draws within a round.
pub const TAG_NETWORK: u64 = 1;
/// Stream tag for quality draws within a round.
pub const TAG_QUALITY: u64 = 2;
/// Stream tag for review-noise draws within a round.
pub const TAG_REVIEWS: u64 = 3;

/// SplitMix64 finalizer (Steele, Lea & Flood's constants).
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive the seed of an independent child stream.
pub fn sub_seed(master: u64, tag: u64) -> u64 {
    mix64(master ^ mix64(tag))
}

/// Generator for a derived stream.
pub fn stream(master: u64, tag: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(sub_seed(master, tag))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_seed_separates_tags_and_masters() {
        assert_ne!(sub_seed(42, 0), sub_seed(42, 1));
        assert_ne!(sub_seed(42, 0), sub_seed(43, 0));
        // Stable values: the splitting rule is a documented contract.
        assert_eq!(sub_seed(0, 0), mix64(mix64(0)));
    }

    #[test]
    fn streams_are_reproducible() {
        use rand::RngCore;
        let mut a = stream(7, TAG_QUALITY);
        let mut b = stream(7, TAG_QUALITY);
        assert_eq!(a.next_u64(), b.next_u64());
    }
}
