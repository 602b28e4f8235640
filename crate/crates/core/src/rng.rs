//! Seed derivation and independent random streams.
//!
//! Every random draw of an estimator run comes from a ChaCha8 stream keyed by
//! the run seed and selected by a stream id (subcube linear index, or one of
//! the reserved ids below). Replication seeds are derived from a master seed
//! with SplitMix64, so replications can run on any thread in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream carrying the shared interpolation shift ξ.
pub const SHIFT_STREAM: u64 = u64::MAX;
/// Stream carrying cube-wide iid samples (classical CV, CV+MoM, crude MC).
pub const GLOBAL_STREAM: u64 = u64::MAX - 1;

/// One SplitMix64 output step.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `rep` under `master`.
pub fn replication_seed(master: u64, rep: u64) -> u64 {
    splitmix64(master ^ splitmix64(rep.wrapping_add(0x6A09_E667_F3BC_C909)))
}

/// Family of streams sharing one run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Streams {
    seed: u64,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id);
        rng
    }
}
