//! Seeded random streams.
//!
//! Every random draw in the pipeline comes from a ChaCha8 stream selected by
//! `(seed, purpose, index)`. Ensemble members, optimisation steps and weight
//! initialisation therefore never share a stream, and work can be split
//! across threads without changing any result.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. The discriminant is mixed into the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Subsample = 0x5350_5355_4253_414d,
    WeightInit = 0x494e_4954_5745_4947,
    Batch = 0x4241_5443_4853_414d,
    Evaluation = 0x4556_414c_5452_4950,
    Projection = 0x5352_5050_524f_4a45,
    Experiment = 0x4558_5045_5249_4d45,
}

/// Returns the stream for `(seed, purpose, index)`.
pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ purpose as u64);
    rng.set_stream(index);
    rng
}
