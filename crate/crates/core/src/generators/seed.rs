use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// The RNG type handed out by [`SeedSequence`].
pub type StreamRng = ChaCha8Rng;

/// Derives independent child streams from a master seed.
///
/// A child seed is the SHA-256 digest of `(master_seed, stream name,
/// index)`, so streams do not depend on the order in which they are
/// requested and parallel realizations can draw from them freely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSequence {
    master_seed: u64,
}

impl SeedSequence {
    pub fn new(master_seed: u64) -> Self {
        SeedSequence { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn child_seed(&self, stream: &str, index: u64) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update(b"graphent-seed-v1");
        hasher.update(self.master_seed.to_le_bytes());
        hasher.update((stream.len() as u64).to_le_bytes());
        hasher.update(stream.as_bytes());
        hasher.update(index.to_le_bytes());
        hasher.finalize().into()
    }

    pub fn rng(&self, stream: &str, index: u64) -> StreamRng {
        StreamRng::from_seed(self.child_seed(stream, index))
    }
}
