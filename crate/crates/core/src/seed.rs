//! Seed derivation. Every random stream in a run is keyed by a component label
//! hashed together with the root seed, so any sub-pipeline can be replayed alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type SimRng = ChaCha8Rng;

/// `SHA-256(root as little-endian u64 || label)`, first eight bytes, little-endian.
pub fn derive_seed(root: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(root.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

pub fn rng_for(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(root: u64, label: &str) -> SimRng {
    rng_for(derive_seed(root, label))
}
