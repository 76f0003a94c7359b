//! Deterministic RNG derivation.
//!
//! All randomness in an experiment flows from a single master seed. Every
//! consumer (noise for trial `i`, codebook generation, relay matrix for node
//! `j`, ...) gets its own ChaCha stream derived from `(master, domain, index)`,
//! so reordering work across threads cannot change any individual outcome.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent randomness domains. The domain tag occupies the top byte of the
/// ChaCha stream id, the index the remaining 56 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Channel noise for one simulated block (index = trial id).
    TrialNoise = 1,
    /// Message selection for one trial.
    TrialMessage = 2,
    /// Source codebook generation.
    Codebook = 3,
    /// Relay matrix generation (index = node id).
    RelayMatrix = 4,
    /// Association-set forward simulations (index = trial * big + message).
    Association = 5,
    /// Monte Carlo cut MI sampling (index = term id).
    CutsetMc = 6,
    /// Bootstrap resampling.
    Bootstrap = 7,
    /// Random test instance generation.
    TestGen = 8,
    /// Monte Carlo estimation of per-node channel statistics.
    LawStats = 9,
}

const INDEX_MASK: u64 = (1 << 56) - 1;

/// Derive the RNG for `(master, domain, index)`.
pub fn derive(master: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((domain as u64) << 56) | (index & INDEX_MASK));
    rng
}
