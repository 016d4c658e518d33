//! Keyed random streams.
//!
//! Every stream is a ChaCha8 generator whose 256-bit seed is the SHA-256
//! digest of the little-endian 64-bit run seed followed by the UTF-8 bytes
//! of a key (usually an image id). Streams for different items are
//! independent of each other and of evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn keyed_rng(seed: u64, key: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(key.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 32];
    bytes.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(bytes)
}

/// Uniform draw in `[0, 1)` from the top 53 bits of one 64-bit output.
pub fn unit(rng: &mut ChaCha8Rng) -> f64 {
    use rand::RngCore;
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in `[lo, hi]`.
pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

/// `true` with probability `p`.
pub fn bernoulli(rng: &mut ChaCha8Rng, p: f64) -> bool {
    p > 0.0 && unit(rng) < p
}

/// Uniform integer in `lo..=hi`.
pub fn int_inclusive(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> u32 {
    let span = (hi - lo) as f64 + 1.0;
    lo + ((unit(rng) * span) as u32).min(hi - lo)
}

/// SHA-256 of `bytes` as lowercase hex.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_same_stream() {
        let mut a = keyed_rng(42, "ISIC_0000000");
        let mut b = keyed_rng(42, "ISIC_0000000");
        for _ in 0..100 {
            assert_eq!(unit(&mut a).to_bits(), unit(&mut b).to_bits());
        }
    }

    #[test]
    fn key_and_seed_both_matter() {
        let first = |s, k| unit(&mut keyed_rng(s, k));
        assert_ne!(first(1, "a"), first(1, "b"));
        assert_ne!(first(1, "a"), first(2, "a"));
    }

    #[test]
    fn ranges() {
        let mut r = keyed_rng(0, "r");
        for _ in 0..10_000 {
            let u = unit(&mut r);
            assert!((0.0..1.0).contains(&u));
            let k = int_inclusive(&mut r, 3, 5);
            assert!((3..=5).contains(&k));
        }
        assert_eq!(int_inclusive(&mut r, 16, 16), 16);
        assert!(!bernoulli(&mut r, 0.0));
    }

    #[test]
    fn digest_hex() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
