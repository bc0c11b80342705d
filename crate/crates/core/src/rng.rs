//! Counter-based random streams.
//!
//! Each trial draws from its own ChaCha8 stream selected by `(master, stream)`.
//! The generator is a pure function of the pair, so trials can run in any
//! order on any number of threads and still reproduce bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used by every sampler in the crate.
pub type TrialRng = ChaCha8Rng;

/// Key of one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomSeed {
    pub master: u64,
    pub stream: u64,
}

impl RandomSeed {
    pub const fn new(master: u64, stream: u64) -> Self {
        Self { master, stream }
    }

    /// Seed for trial `index` of an experiment keyed by `master`.
    pub const fn trial(master: u64, index: u64) -> Self {
        Self::new(master, index)
    }

    pub fn rng(&self) -> TrialRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}
