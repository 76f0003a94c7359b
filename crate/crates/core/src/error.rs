//! Crate-wide error type.

use crate::topology::Violation;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A topology has no edges, so the precision parameter is undefined.
    #[error("empty network: topology declares no edges")]
    EmptyNetwork,

    /// Cut enumeration would produce more subsets than the configured cap.
    #[error("cut explosion: 2^{free_nodes} cuts exceeds cap 2^{cap_log2}")]
    CutExplosion { free_nodes: u32, cap_log2: u32 },

    /// Structural invariants of a topology are violated.
    #[error("invalid topology: {0:?}")]
    InvalidTopology(Vec<Violation>),

    /// A topology file could not be parsed.
    #[error("topology parse error: {0}")]
    Parse(String),

    /// Vector/matrix dimensions do not line up.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// `propagate` was called without a transmission for some parent.
    #[error("missing transmission for parent node {0}")]
    MissingTransmission(usize),

    /// The tail tolerance for the transition-law fold sum is out of range.
    #[error("tail tolerance {0} outside (0, 1e-6]")]
    TailTolOutOfRange(f64),

    /// Exact ML decoding would enumerate a per-layer state space above the cap.
    #[error("instance too large for exact ML: layer state space 2^{bits} exceeds cap 2^{cap_bits}")]
    MlStateCap { bits: u32, cap_bits: u32 },

    /// Exact discrete cut MI would enumerate above the cap; use the Monte Carlo variant.
    #[error(
        "exact enumeration cap exceeded for cut mutual information \
         (2^{bits} > 2^{cap_bits}); use the Monte Carlo variant"
    )]
    EnumerationCap { bits: u32, cap_bits: u32 },

    /// A Monte Carlo cut MI term is too large for every available estimator.
    #[error("cut MI term too large for available estimators ({0})")]
    TermTooLarge(String),

    /// Codebook generation would exceed the memory cap.
    #[error("codebook too large: 2^{message_bits} codewords of {block_bits} bits exceeds cap of {cap_bits} total bits")]
    CodebookTooLarge {
        message_bits: u32,
        block_bits: usize,
        cap_bits: u64,
    },

    /// Association sampling retained no traces at some node.
    #[error("no retained samples at node {node}: epsilon too small or sample count too small")]
    NoRetainedSamples { node: usize },

    /// An observed symbol lies outside the reference law's alphabet.
    #[error("alphabet mismatch: observed symbol {symbol} outside alphabet of size {alphabet}")]
    AlphabetMismatch { symbol: usize, alphabet: usize },

    /// A channel gain is non-finite.
    #[error("non-finite gain on edge {from}->{to}")]
    NonFiniteGain { from: usize, to: usize },

    /// Generic configuration error (bad parameter combinations).
    #[error("invalid configuration: {0}")]
    Config(String),
}
