//! Seed derivation and the portable random generator used throughout.
//!
//! Every stochastic step (bootstrap replicate, restart perturbation, forest
//! tree, sampling block) draws from its own ChaCha8 stream whose seed is
//! `derive(parent, label)`: the first eight bytes (little endian) of
//! SHA-256 over the parent seed's little-endian bytes followed by the UTF-8
//! label. Results therefore never depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

pub fn derive(parent: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(parent.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(head)
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(parent: u64, label: &str) -> Rng {
    rng(derive(parent, label))
}
