//! Simulation and analysis toolkit for layered Gaussian relay networks operated
//! over a quantization-based digital interface.
//!
//! The toolkit models a relay network twice: as the usual complex AWGN network,
//! and as the *discrete network* obtained by constraining every transmit symbol
//! to a `2n`-bit QAM-like constellation and quantizing every reception back to a
//! `2n`-bit tuple. On top of the discrete interface it implements a random
//! GF(2) linear network code (random source codebook, one random square binary
//! matrix per relay) together with two destination decoders, and a cut-set
//! bound engine that evaluates both the Gaussian log-det bound and the discrete
//! network's uniform-input bound, exactly where enumeration is feasible and by
//! Monte Carlo elsewhere.
//!
//! Modules map onto the moving parts:
//!
//! - [`topology`]: layered directed graphs with complex gains, validation,
//!   the global precision parameter `n`, and cut enumeration.
//! - [`discrete`]: the bit-tuple modulator and the sign-discarding quantizer.
//! - [`gf2`]: word-packed binary vectors and matrices.
//! - [`channel`]: AWGN propagation, the block-synchronous network simulator,
//!   and an exact per-symbol transition-law oracle.
//! - [`lincode`]: codebooks, relay mappings, typicality machinery, and the
//!   typicality and exact-ML decoders.
//! - [`cutset`]: per-cut mutual informations, cut-set bounds, multicast bounds,
//!   and gain-scaling gap sweeps.
//! - [`experiment`]: deterministic seeded block-error-rate experiments.

pub mod channel;
pub mod cutset;
pub mod discrete;
pub mod error;
pub mod experiment;
pub mod gf2;
pub mod lincode;
pub mod seeding;
pub mod topology;

pub use error::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
