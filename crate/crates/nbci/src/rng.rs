//! Deterministic derivation of independent random substreams.
//!
//! Every simulation trial owns its own ChaCha8 stream whose key is derived
//! from the master seed and the identifying words of the cell and trial.
//! The derivation is a fixed, documented hash (iterated SplitMix64
//! finalizer), so any cell or trial can be re-run in isolation and the
//! result is independent of worker count or execution order.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// SplitMix64 finalizer step.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash a master seed together with identifying words (parameter bits,
/// indices) into a derived seed.
pub fn derive_seed(master: u64, words: &[u64]) -> u64 {
    let mut h = mix64(master);
    for &w in words {
        h = mix64(h ^ w);
    }
    h
}

/// Expand a derived seed into a ChaCha8 stream.
pub fn stream(seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut s = seed;
    for chunk in key.chunks_exact_mut(8) {
        s = mix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Uniform draw in the open interval (0, 1) with 53-bit resolution.
///
/// Zero is rejected so callers may take logarithms.
pub fn open01<R: RngCore>(rng: &mut R) -> f64 {
    loop {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u > 0.0 {
            return u;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_seed_is_stable_and_order_sensitive() {
        let a = derive_seed(42, &[1, 2, 3]);
        let b = derive_seed(42, &[1, 2, 3]);
        assert_eq!(a, b);
        assert_ne!(a, derive_seed(42, &[3, 2, 1]));
        assert_ne!(a, derive_seed(43, &[1, 2, 3]));
    }

    #[test]
    fn streams_reproduce() {
        let mut r1 = stream(derive_seed(7, &[11]));
        let mut r2 = stream(derive_seed(7, &[11]));
        for _ in 0..64 {
            assert_eq!(r1.next_u64(), r2.next_u64());
        }
        let mut r3 = stream(derive_seed(7, &[12]));
        let same = (0..64).all(|_| r1.next_u64() == r3.next_u64());
        assert!(!same);
    }

    #[test]
    fn open01_is_in_range() {
        let mut rng = stream(1);
        for _ in 0..10_000 {
            let u = open01(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }
}
