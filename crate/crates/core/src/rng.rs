//! Seeded random number generation for trajectory sampling.
//!
//! ChaCha20 has a fixed, documented output stream, so a recorded seed
//! reproduces a run bit for bit across platforms and releases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Generator used for all sampling.
pub type WalkRng = ChaCha20Rng;

/// Recorded in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64)";

pub fn seeded(seed: u64) -> WalkRng {
    WalkRng::seed_from_u64(seed)
}

/// `count` per-sample seeds drawn from a master seed.
pub fn derive_seeds(master: u64, count: usize) -> Vec<u64> {
    let mut rng = seeded(master);
    (0..count).map(|_| rng.random()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = (0..8).scan(seeded(7), |r, _| Some(r.random())).collect();
        let b: Vec<u64> = (0..8).scan(seeded(7), |r, _| Some(r.random())).collect();
        assert_eq!(a, b);
        assert_ne!(derive_seeds(1, 4), derive_seeds(2, 4));
        assert_eq!(derive_seeds(3, 5), derive_seeds(3, 5));
    }
}
