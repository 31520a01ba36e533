//! Seeded random streams.
//!
//! All randomness in the crate flows through [`stream`], so a `(seed, tag)`
//! pair fully determines every sample. Seed ranges fan out as
//! `base + index`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Independent stream for `seed`, separated from other consumers of the
/// same seed by `tag`.
pub fn stream(seed: u64, tag: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}

pub mod tags {
    pub const EXCURSION: u64 = 1;
    pub const LABELS: u64 = 2;
    pub const COVARIANCE: u64 = 3;
    pub const MOBILE: u64 = 4;
    pub const ROOT_SIGN: u64 = 5;
    pub const TRIALS: u64 = 6;
    pub const SUBSAMPLE: u64 = 7;
}
