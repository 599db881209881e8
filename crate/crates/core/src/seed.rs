use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// The crate's seeded generator. ChaCha8 output is stable across platforms and releases of
/// `rand_chacha`, which is what makes stored seeds reproducible.
pub(crate) type SeededRng = ChaCha8Rng;

pub(crate) fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives a sub-seed from a base seed and a list of string parts.
///
/// The mapping is SHA-256 over a length-prefixed encoding, truncated to 64 bits, so distinct part
/// lists never alias by concatenation.
pub fn derive_seed(base: u64, parts: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(base.to_le_bytes());
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_seed_separates_parts() {
        assert_ne!(derive_seed(0, &["ab", "c"]), derive_seed(0, &["a", "bc"]));
        assert_ne!(derive_seed(0, &["x"]), derive_seed(1, &["x"]));
        assert_eq!(derive_seed(7, &["x", "y"]), derive_seed(7, &["x", "y"]));
    }
}
