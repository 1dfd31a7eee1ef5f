//! Counter-based randomness: a stream is a seed plus a derivation path.
//!
//! Each `(seed, path)` hashes to a 64-bit key that seeds a ChaCha8 generator.
//! Children are derived by appending a label, so nested contexts (trial,
//! hybrid slot, boosting round, ...) get their own replayable generators
//! without sharing mutable state.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RandomnessStream {
    seed: u64,
    path: Vec<u64>,
    key: u64,
}

impl RandomnessStream {
    pub fn new(seed: u64) -> Self {
        RandomnessStream { seed, path: Vec::new(), key: mix(seed ^ 0x5851_F42D_4C95_7F2D) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Derive the child stream labelled `label`.
    pub fn child(&self, label: u64) -> Self {
        let mut path = Vec::with_capacity(self.path.len() + 1);
        path.extend_from_slice(&self.path);
        path.push(label);
        RandomnessStream { seed: self.seed, path, key: mix(self.key ^ mix(label ^ 0xD6E8_FEB8_6659_FD93)) }
    }

    /// Child derived from a sequence of labels.
    pub fn descend(&self, labels: &[u64]) -> Self {
        labels.iter().fold(self.clone(), |s, &l| s.child(l))
    }

    /// Generator owned by this stream; the same stream always yields the same sequence.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.key)
    }

    /// Hash of `(seed, path)`.
    pub fn key(&self) -> u64 {
        self.key
    }
}

impl fmt::Display for RandomnessStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.seed)?;
        for p in &self.path {
            write!(f, "/{p}")?;
        }
        Ok(())
    }
}

/// Reserved child labels. Kept far from small trial indices.
pub(crate) mod label {
    pub const POINTS: u64 = 1 << 40;
    pub const LABELS: u64 = (1 << 40) + 1;
    pub const REFUTER: u64 = (1 << 40) + 2;
    pub const CONTEXTS: u64 = (1 << 40) + 3;
    pub const SELECTION: u64 = (1 << 40) + 4;
    pub const ROUNDING: u64 = (1 << 40) + 5;
    pub const HOLDOUT: u64 = (1 << 40) + 6;
    pub const NOISE: u64 = (1 << 40) + 7;
    pub const STRUCTURED: u64 = (1 << 40) + 8;
    pub const SMOOTHING: u64 = (1 << 40) + 9;
    pub const ROUNDS: u64 = (1 << 40) + 10;
    pub const EVAL: u64 = (1 << 40) + 11;
}
