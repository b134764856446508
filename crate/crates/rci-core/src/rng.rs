//! Seed-stream derivation.
//!
//! Every randomized operation draws from its own ChaCha stream keyed by
//! `(seed, purpose, index)`, so replications can run in parallel and still be
//! bit-reproducible regardless of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a derived stream is used for. Each purpose gets an independent stream
/// even under the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Edge coefficients of a generated SEM.
    Theta,
    /// Label coefficients of a generated SEM.
    Beta,
    /// Error-distribution tags of a generated SEM.
    Dists,
    /// Realized error terms of a cohort.
    Errors,
    /// Bernoulli label draws of a cohort.
    Labels,
    /// Train/test row shuffling.
    Split,
    /// Per-replication seed derivation in benchmark harnesses.
    Replication,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Theta => 1,
            Stream::Beta => 2,
            Stream::Dists => 3,
            Stream::Errors => 4,
            Stream::Labels => 5,
            Stream::Split => 6,
            Stream::Replication => 7,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a 64-bit sub-seed; used by harnesses that hand one seed per
/// replication to downstream operations.
pub fn derive_seed(seed: u64, purpose: Stream, index: u64) -> u64 {
    let mut state = seed;
    let mut out = splitmix64(&mut state);
    state ^= purpose.tag().wrapping_mul(0xA24B_AED4_963E_E407);
    out ^= splitmix64(&mut state);
    state ^= index.wrapping_mul(0x9FB2_1C65_1E98_DF25);
    out ^ splitmix64(&mut state)
}

/// An independent generator for `(seed, purpose, index)`.
pub fn stream(seed: u64, purpose: Stream, index: u64) -> ChaCha8Rng {
    let mut state = seed;
    let a = splitmix64(&mut state);
    state ^= purpose.tag().wrapping_mul(0xA24B_AED4_963E_E407);
    let b = splitmix64(&mut state);
    state ^= index.wrapping_mul(0x9FB2_1C65_1E98_DF25);
    let c = splitmix64(&mut state);
    let d = splitmix64(&mut state);

    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&a.to_le_bytes());
    key[8..16].copy_from_slice(&b.to_le_bytes());
    key[16..24].copy_from_slice(&c.to_le_bytes());
    key[24..32].copy_from_slice(&d.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
