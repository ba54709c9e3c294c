//! Deterministic seed substreams.
//!
//! Every task (Monte-Carlo chunk, sweep point, random instance) owns a
//! disjoint stream derived from the master seed, so results are
//! reproducible bit-for-bit and independent of how work is scheduled.

use rand_chacha::rand_core::SeedableRng;

/// The random stream used throughout the crate.
pub type Stream = rand_chacha::ChaCha12Rng;

/// 2^64 / golden ratio; spreads task indices over the seed space.
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed for task `task` under `master`: `master XOR (GOLDEN * (task+1))`.
pub fn substream_seed(master: u64, task: u64) -> u64 {
    master ^ GOLDEN.wrapping_mul(task.wrapping_add(1))
}

/// Construct the stream for task `task` under `master`.
pub fn stream(master: u64, task: u64) -> Stream {
    Stream::seed_from_u64(substream_seed(master, task))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn substreams_are_distinct_and_reproducible() {
        let a: u64 = stream(7, 0).random();
        let b: u64 = stream(7, 1).random();
        let a2: u64 = stream(7, 0).random();
        assert_ne!(a, b, "adjacent substreams must differ");
        assert_eq!(a, a2, "same (master, task) must reproduce");
    }

    #[test]
    fn master_seed_changes_every_substream() {
        for task in 0..8 {
            assert_ne!(substream_seed(1, task), substream_seed(2, task));
        }
    }
}
