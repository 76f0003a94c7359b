//! The linear network code over the discrete interface.
//!
//! The source draws `2^B` random binary codewords of `2nN` bits; every relay
//! multiplies its buffered `2nN`-bit reception by its own random square binary
//! matrix and transmits the result. The destination decides on a message by
//! channel-consistency: candidate transmit blocks for each message come from
//! forward-sampled association chains, and a candidate is accepted when the
//! destination's reception is typical for the channel law it induces.
//!
//! Two typicality tests are provided. [`typicality_test`] is the classical
//! strong (per-letter relative-frequency) test; it is the reference
//! definition, but at block lengths of practical size it rejects essentially
//! every sequence whose alphabet is larger than the block, so the decoder
//! instead uses [`entropy_typical`], the scalar weak-typicality test on the
//! empirical log-likelihood. The two agree as the block length grows.

use std::collections::BTreeMap;

use rand::Rng;

use crate::channel::{
    component_law, component_prob, signal_sum, simulate_network_block, GaussianNoise, NoiseSource,
    TransitionTable,
};
use crate::discrete::{unpack_block, BitTuple};
use crate::gf2::{matvec, random_matrix, BinaryMatrix, BinaryVector};
use crate::seeding::{derive, Domain};
use crate::topology::{Gain, Precision, Topology};
use crate::{Error, Result};

/// Default cap on total codebook storage: `2^B * 2nN` bits.
pub const DEFAULT_CODEBOOK_CAP_BITS: u64 = 1 << 30;

/// Default cap on the exact-ML per-layer joint state space, in bits.
pub const DEFAULT_ML_STATE_CAP_BITS: u32 = 24;

/// Z-score of the finite-block slack in the entropy-typicality test.
const TYPICALITY_Z: f64 = 3.0;

// ---------------------------------------------------------------------------
// Codebook and relay assignment
// ---------------------------------------------------------------------------

/// A random source codebook: `2^message_bits` codewords of `2nN` bits each.
#[derive(Debug, Clone)]
pub struct Codebook {
    message_bits: u32,
    num_symbols: usize,
    n: Precision,
    codewords: Vec<BinaryVector>,
}

impl Codebook {
    pub fn message_bits(&self) -> u32 {
        self.message_bits
    }

    pub fn message_count(&self) -> u64 {
        1u64 << self.message_bits
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn precision(&self) -> Precision {
        self.n
    }

    pub fn block_bits(&self) -> usize {
        self.n.tuple_bits() * self.num_symbols
    }

    pub fn codeword(&self, message: u64) -> &BinaryVector {
        &self.codewords[message as usize]
    }

    /// Rate in bits per symbol, `B / N`.
    pub fn rate(&self) -> f64 {
        self.message_bits as f64 / self.num_symbols as f64
    }
}

/// Draw a codebook of `2^message_bits` codewords, each `2nN` i.i.d. fair bits.
pub fn generate_codebook(
    message_bits: u32,
    num_symbols: usize,
    n: Precision,
    rng: &mut impl Rng,
    cap_total_bits: u64,
) -> Result<Codebook> {
    let block_bits = n.tuple_bits() * num_symbols;
    let total = (block_bits as u64)
        .checked_shl(message_bits)
        .filter(|&t| t <= cap_total_bits);
    if total.is_none() {
        return Err(Error::CodebookTooLarge {
            message_bits,
            block_bits,
            cap_bits: cap_total_bits,
        });
    }
    let codewords = (0..1u64 << message_bits)
        .map(|_| BinaryVector::random(block_bits, rng))
        .collect();
    Ok(Codebook {
        message_bits,
        num_symbols,
        n,
        codewords,
    })
}

/// One random square binary matrix per coding relay.
#[derive(Debug, Clone)]
pub struct RelayCodeAssignment {
    matrices: BTreeMap<usize, BinaryMatrix>,
}

impl RelayCodeAssignment {
    /// Generate a matrix for every node returned by
    /// [`Topology::coding_nodes`], deterministically from the seed.
    pub fn generate(topology: &Topology, n: Precision, num_symbols: usize, seed: u64) -> Self {
        let bits = n.tuple_bits() * num_symbols;
        let matrices = topology
            .coding_nodes()
            .into_iter()
            .map(|node| {
                let mut rng = derive(seed, Domain::RelayMatrix, node as u64);
                (node, random_matrix(bits, bits, &mut rng))
            })
            .collect();
        Self { matrices }
    }

    pub fn from_matrices(matrices: BTreeMap<usize, BinaryMatrix>) -> Self {
        Self { matrices }
    }

    pub fn matrices(&self) -> &BTreeMap<usize, BinaryMatrix> {
        &self.matrices
    }

    pub fn matrix(&self, node: usize) -> Option<&BinaryMatrix> {
        self.matrices.get(&node)
    }
}

/// Apply a relay's linear code and split the image into per-symbol tuples.
pub fn relay_map(
    a: &BinaryMatrix,
    received: &BinaryVector,
    n: Precision,
    num_symbols: usize,
) -> Result<Vec<BitTuple>> {
    unpack_block(&matvec(a, received)?, n, num_symbols)
}

// ---------------------------------------------------------------------------
// Typicality
// ---------------------------------------------------------------------------

/// Strong typicality (per-letter relative-frequency test): a sequence of
/// alphabet indices is epsilon-typical for `law` when every letter's empirical
/// frequency is within `epsilon * p(a)` of `p(a)`. A letter of zero
/// probability may not occur at all.
pub fn typicality_test(observed: &[usize], law: &[f64], epsilon: f64) -> Result<bool> {
    assert!(epsilon > 0.0);
    let mut counts = vec![0u64; law.len()];
    for &sym in observed {
        if sym >= law.len() {
            return Err(Error::AlphabetMismatch {
                symbol: sym,
                alphabet: law.len(),
            });
        }
        counts[sym] += 1;
    }
    let len = observed.len() as f64;
    Ok(law.iter().zip(&counts).all(|(&p, &c)| {
        let nu = c as f64 / len;
        (nu - p).abs() <= epsilon * p
    }))
}

/// Stack per-time symbols of several sequences into joint-alphabet indices,
/// for joint strong typicality. Sequence `i` contributes its symbol scaled by
/// the product of the earlier alphabet sizes.
pub fn stack_joint_symbols(sequences: &[&[usize]], alphabet_sizes: &[usize]) -> Result<Vec<usize>> {
    assert_eq!(sequences.len(), alphabet_sizes.len());
    let len = sequences.first().map_or(0, |s| s.len());
    for s in sequences {
        if s.len() != len {
            return Err(Error::DimensionMismatch {
                context: "joint symbol stacking",
                expected: len,
                got: s.len(),
            });
        }
    }
    let mut out = vec![0usize; len];
    for t in 0..len {
        let mut idx = 0usize;
        let mut scale = 1usize;
        for (seq, &size) in sequences.iter().zip(alphabet_sizes) {
            debug_assert!(seq[t] < size);
            idx += seq[t] * scale;
            scale *= size;
        }
        out[t] = idx;
    }
    Ok(out)
}

/// Exact mean and standard deviation of the per-symbol negative log
/// likelihood under a law, in bits. The mean is the entropy.
#[derive(Debug, Clone, Copy)]
pub struct LawStats {
    pub entropy_bits: f64,
    pub nll_std_bits: f64,
}

/// Stats of `-log2 p(Z)` for `Z ~ law`.
pub fn law_stats(law: &[f64]) -> LawStats {
    let mut h = 0.0;
    let mut m2 = 0.0;
    for &p in law {
        if p > 0.0 {
            let l = -p.log2();
            h += p * l;
            m2 += p * l * l;
        }
    }
    LawStats {
        entropy_bits: h,
        nll_std_bits: (m2 - h * h).max(0.0).sqrt(),
    }
}

/// Weak (entropy) typicality with a finite-block allowance: the empirical mean
/// negative log likelihood may exceed the law's entropy by at most `epsilon`
/// bits plus a `3 sigma / sqrt(len)` sampling slack. Observing a
/// zero-probability symbol (infinite NLL) fails the test for finite epsilon.
pub fn entropy_typical(nll_bits: &[f64], stats: &LawStats, epsilon: f64) -> bool {
    assert!(epsilon > 0.0);
    if epsilon.is_infinite() {
        return true;
    }
    let len = nll_bits.len() as f64;
    let mean = nll_bits.iter().sum::<f64>() / len;
    if !mean.is_finite() {
        return false;
    }
    mean <= stats.entropy_bits + epsilon + TYPICALITY_Z * stats.nll_std_bits / len.sqrt()
}

// ---------------------------------------------------------------------------
// Per-node channel statistics
// ---------------------------------------------------------------------------

/// Reference laws and statistics of one node's incoming channel under i.i.d.
/// uniform parent inputs.
#[derive(Debug, Clone)]
struct NodeChannel {
    parent_gains: Vec<Gain>,
    /// Law of the received tuple under uniform parent inputs.
    marginal: Vec<f64>,
    marginal_stats: LawStats,
    /// Stats of `-log2 p(y | x)` with `x` uniform and `y ~ p(. | x)`.
    conditional_stats: LawStats,
}

/// Exhaustive parent-configuration enumeration is used up to this many bits.
const EXACT_STATS_BITS: u32 = 14;
const STATS_MC_SAMPLES: usize = 2048;

fn node_channel(
    topology: &Topology,
    node: usize,
    n: Precision,
    tail_tol: f64,
    stats_seed: u64,
) -> NodeChannel {
    let parent_gains: Vec<Gain> = topology.parents(node).iter().map(|&(_, g)| g).collect();
    let q = parent_gains.len() as u32;
    let config_bits = 2 * n.get() * q;

    let levels = n.component_levels() as usize;
    let alphabet = n.tuple_alphabet();
    let mut marginal = vec![0.0; alphabet];
    // accumulators for the law of -log2 p(y|x)
    let (mut mean_acc, mut sq_acc) = (0.0, 0.0);

    let mut absorb = |g_re: f64, g_im: f64, weight: f64| {
        let pr = component_law(g_re, n, tail_tol);
        let pi = component_law(g_im, n, tail_tol);
        let (mut h, mut m2) = (0.0, 0.0);
        for law in [&pr, &pi] {
            for &p in law.iter() {
                if p > 0.0 {
                    let l = -p.log2();
                    h += p * l;
                    m2 += p * l * l;
                }
            }
        }
        // components are independent given x: E[(a+b)^2] = E[a^2]+E[b^2]+2E[a]E[b]
        let (hr, hi) = {
            let hr: f64 = pr.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
            (hr, h - hr)
        };
        mean_acc += weight * h;
        sq_acc += weight * (m2 + 2.0 * hr * hi);
        for (vi, &qi) in pi.iter().enumerate() {
            for (vr, &qr) in pr.iter().enumerate() {
                marginal[vr + vi * levels] += weight * qr * qi;
            }
        }
    };

    if config_bits <= EXACT_STATS_BITS {
        let configs = 1u64 << config_bits;
        let w = 1.0 / configs as f64;
        let mut tuples = vec![BitTuple::zero(n); q as usize];
        for config in 0..configs {
            for (i, t) in tuples.iter_mut().enumerate() {
                let idx = config >> (2 * n.get() as u64 * i as u64) & (alphabet as u64 - 1);
                *t = BitTuple::from_index(idx, n);
            }
            let g = signal_sum(&parent_gains, &tuples);
            absorb(g.re, g.im, w);
        }
    } else {
        let mut rng = derive(stats_seed, Domain::LawStats, node as u64);
        let w = 1.0 / STATS_MC_SAMPLES as f64;
        for _ in 0..STATS_MC_SAMPLES {
            let tuples: Vec<BitTuple> = (0..q)
                .map(|_| BitTuple::from_index(rng.random_range(0..alphabet as u64), n))
                .collect();
            let g = signal_sum(&parent_gains, &tuples);
            absorb(g.re, g.im, w);
        }
    }

    let conditional_stats = LawStats {
        entropy_bits: mean_acc,
        nll_std_bits: (sq_acc - mean_acc * mean_acc).max(0.0).sqrt(),
    };
    let marginal_stats = law_stats(&marginal);
    NodeChannel {
        parent_gains,
        marginal,
        marginal_stats,
        conditional_stats,
    }
}

/// Precomputed per-node channel statistics shared by decoders and filters.
#[derive(Debug, Clone)]
pub struct DecoderContext {
    n: Precision,
    tail_tol: f64,
    nodes: BTreeMap<usize, NodeChannel>,
}

impl DecoderContext {
    /// Build statistics for every non-source node, deterministically from
    /// `stats_seed` (only consulted where exhaustive enumeration is too big).
    pub fn build(topology: &Topology, n: Precision, tail_tol: f64, stats_seed: u64) -> Self {
        let nodes = (1..topology.node_count())
            .map(|v| (v, node_channel(topology, v, n, tail_tol, stats_seed)))
            .collect();
        Self { n, tail_tol, nodes }
    }

    pub fn precision(&self) -> Precision {
        self.n
    }

    /// Per-symbol NLL of a reception tuple under the node's uniform-input
    /// marginal reception law.
    fn marginal_nll(&self, node: usize, tuple: BitTuple) -> f64 {
        let p = self.nodes[&node].marginal[tuple.index() as usize];
        if p > 0.0 {
            -p.log2()
        } else {
            f64::INFINITY
        }
    }

    /// Per-symbol NLL of a reception given candidate parent tuples.
    fn conditional_nll(&self, node: usize, parents: &[BitTuple], received: BitTuple) -> f64 {
        let ch = &self.nodes[&node];
        debug_assert_eq!(parents.len(), ch.parent_gains.len());
        let g = signal_sum(&ch.parent_gains, parents);
        let pr = component_prob(received.re_value(), g.re, self.n, self.tail_tol);
        let pi = component_prob(received.im_value(), g.im, self.n, self.tail_tol);
        let p = pr * pi;
        if p > 0.0 {
            -p.log2()
        } else {
            f64::INFINITY
        }
    }

    /// Uniform-input reception law of a node (exact for small parent sets,
    /// Monte Carlo averaged otherwise).
    pub fn reception_law(&self, node: usize) -> &[f64] {
        &self.nodes[&node].marginal
    }

    pub fn reception_law_stats(&self, node: usize) -> LawStats {
        self.nodes[&node].marginal_stats
    }

    pub fn conditional_stats(&self, node: usize) -> LawStats {
        self.nodes[&node].conditional_stats
    }
}

// ---------------------------------------------------------------------------
// Association sampling
// ---------------------------------------------------------------------------

/// Sampled stand-in for the association sets of one message: the retained
/// received/transmit block pairs of every coding node.
#[derive(Debug, Clone)]
pub struct AssociationSample {
    pub message: u64,
    /// Per coding node: retained `(received, transmit)` block pairs.
    pub per_node: BTreeMap<usize, Vec<(BinaryVector, BinaryVector)>>,
    pub sample_count: usize,
}

/// One forward-simulated trace of the network under a fixed message.
#[derive(Debug, Clone)]
struct Chain {
    received: BTreeMap<usize, BinaryVector>,
    transmit: BTreeMap<usize, BinaryVector>,
    /// Nodes whose reception passed the typicality filter.
    passed: BTreeMap<usize, bool>,
}

fn sample_chains(
    topology: &Topology,
    codebook: &Codebook,
    relays: &RelayCodeAssignment,
    ctx: &DecoderContext,
    message: u64,
    count: usize,
    epsilon: f64,
    noise: &mut impl NoiseSource,
) -> Result<Vec<Chain>> {
    let n = codebook.precision();
    let num_symbols = codebook.num_symbols();
    let coding = topology.coding_nodes();
    let mut chains = Vec::with_capacity(count);
    for _ in 0..count {
        let received = simulate_network_block(
            topology,
            codebook.codeword(message),
            relays.matrices(),
            n,
            num_symbols,
            noise,
        )?;
        let mut transmit = BTreeMap::new();
        let mut passed = BTreeMap::new();
        for &node in &coding {
            let rx = &received[&node];
            let nll: Vec<f64> = unpack_block(rx, n, num_symbols)?
                .into_iter()
                .map(|t| ctx.marginal_nll(node, t))
                .collect();
            let ok = entropy_typical(&nll, &ctx.reception_law_stats(node), epsilon);
            passed.insert(node, ok);
            if let Some(a) = relays.matrix(node) {
                transmit.insert(node, matvec(a, rx)?);
            }
        }
        chains.push(Chain {
            received,
            transmit,
            passed,
        });
    }
    Ok(chains)
}

/// Forward-sample the association sets of `message`: simulate the network
/// `count` times under that message and retain, per coding node, the traces
/// whose receptions are typical for the node's uniform-input reception law.
pub fn sample_association_sets(
    message: u64,
    topology: &Topology,
    codebook: &Codebook,
    relays: &RelayCodeAssignment,
    count: usize,
    epsilon: f64,
    ctx: &DecoderContext,
    rng: &mut impl Rng,
) -> Result<AssociationSample> {
    assert!(count >= 1);
    let mut noise = GaussianNoise::new(rng);
    let chains = sample_chains(
        topology, codebook, relays, ctx, message, count, epsilon, &mut noise,
    )?;
    let mut per_node: BTreeMap<usize, Vec<(BinaryVector, BinaryVector)>> = BTreeMap::new();
    for node in topology.coding_nodes() {
        let retained: Vec<_> = chains
            .iter()
            .filter(|c| c.passed[&node])
            .map(|c| {
                let tx = c.transmit.get(&node).cloned().unwrap_or_else(|| {
                    BinaryVector::zeros(codebook.block_bits())
                });
                (c.received[&node].clone(), tx)
            })
            .collect();
        if retained.is_empty() {
            return Err(Error::NoRetainedSamples { node });
        }
        per_node.insert(node, retained);
    }
    Ok(AssociationSample {
        message,
        per_node,
        sample_count: count,
    })
}

// ---------------------------------------------------------------------------
// Decoders
// ---------------------------------------------------------------------------

/// Outcome of the typicality decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded(u64),
    /// Two or more messages were associated with the reception.
    Ambiguous,
    /// No message was associated with the reception.
    NoneAssociated,
}

impl DecodeOutcome {
    pub fn decoded(self) -> Option<u64> {
        match self {
            DecodeOutcome::Decoded(w) => Some(w),
            _ => None,
        }
    }
}

/// Parameters of the typicality decoder.
#[derive(Debug, Clone, Copy)]
pub struct TypicalityParams {
    pub epsilon: f64,
    /// Number of forward association samples per message (`L`).
    pub assoc_samples: usize,
}

impl Default for TypicalityParams {
    fn default() -> Self {
        Self {
            epsilon: 0.25,
            assoc_samples: 64,
        }
    }
}

/// Nodes that can influence `destination`, excluding source and destination.
fn relay_ancestors(topology: &Topology, destination: usize) -> Vec<usize> {
    let mut seen = vec![false; topology.node_count()];
    let mut stack = vec![destination];
    seen[destination] = true;
    while let Some(v) = stack.pop() {
        for &(p, _) in topology.parents(v) {
            if !seen[p] {
                seen[p] = true;
                stack.push(p);
            }
        }
    }
    (1..topology.node_count())
        .filter(|&v| v != destination && seen[v])
        .collect()
}

/// The typicality decoder.
///
/// For each message, forward-sample association chains, keep the chains whose
/// relay receptions are typical, and declare the message associated when some
/// chain's last-layer transmit blocks make the destination reception typical
/// for the induced channel law. Decoding succeeds exactly when one message is
/// associated.
///
/// All internal randomness derives from `assoc_seed`, independently per
/// message, so a decode is a deterministic function of
/// `(reception, code, seed)`.
#[allow(clippy::too_many_arguments)]
pub fn decode_typicality(
    reception: &BinaryVector,
    destination: usize,
    codebook: &Codebook,
    topology: &Topology,
    relays: &RelayCodeAssignment,
    params: TypicalityParams,
    ctx: &DecoderContext,
    assoc_seed: u64,
) -> Result<DecodeOutcome> {
    let n = codebook.precision();
    let num_symbols = codebook.num_symbols();
    let y_tuples = unpack_block(reception, n, num_symbols)?;
    let parent_ids: Vec<usize> = topology.parents(destination).iter().map(|&(p, _)| p).collect();
    let filter_nodes = relay_ancestors(topology, destination);
    let dest_stats = ctx.conditional_stats(destination);

    let mut associated = Vec::new();
    for message in 0..codebook.message_count() {
        let rng = derive(assoc_seed, Domain::Association, message);
        let mut noise = GaussianNoise::new(rng);
        let chains = sample_chains(
            topology,
            codebook,
            relays,
            ctx,
            message,
            params.assoc_samples,
            params.epsilon,
            &mut noise,
        )?;
        let mut hit = false;
        'chains: for chain in &chains {
            for &node in &filter_nodes {
                if !chain.passed.get(&node).copied().unwrap_or(true) {
                    continue 'chains;
                }
            }
            // candidate transmit tuples of the destination's parents
            let mut parent_tuples: Vec<Vec<BitTuple>> = Vec::with_capacity(parent_ids.len());
            for &p in &parent_ids {
                let block = if p == 0 {
                    codebook.codeword(message).clone()
                } else if let Some(tx) = chain.transmit.get(&p) {
                    tx.clone()
                } else {
                    BinaryVector::zeros(codebook.block_bits())
                };
                parent_tuples.push(unpack_block(&block, n, num_symbols)?);
            }
            let nll: Vec<f64> = (0..num_symbols)
                .map(|t| {
                    let at_t: Vec<BitTuple> =
                        parent_tuples.iter().map(|seq| seq[t]).collect();
                    ctx.conditional_nll(destination, &at_t, y_tuples[t])
                })
                .collect();
            if entropy_typical(&nll, &dest_stats, params.epsilon) {
                hit = true;
                break;
            }
        }
        if hit {
            associated.push(message);
            if associated.len() > 1 {
                return Ok(DecodeOutcome::Ambiguous);
            }
        }
    }
    match associated.as_slice() {
        [w] => Ok(DecodeOutcome::Decoded(*w)),
        [] => Ok(DecodeOutcome::NoneAssociated),
        _ => Ok(DecodeOutcome::Ambiguous),
    }
}

/// Exact maximum-likelihood decoder by layer-by-layer marginalization.
///
/// Enumerates, for each message, the joint received-block realizations of the
/// relay layers between source and destination; relay transmissions are
/// deterministic functions of receptions, and per-symbol channel factors come
/// from exact transition tables. Ties break toward the smaller message id.
///
/// Errors when some intermediate layer's joint state space exceeds
/// `2^state_cap_bits`.
pub fn decode_ml_exact(
    reception: &BinaryVector,
    destination: usize,
    codebook: &Codebook,
    topology: &Topology,
    relays: &RelayCodeAssignment,
    tail_tol: f64,
    state_cap_bits: u32,
) -> Result<u64> {
    let n = codebook.precision();
    let num_symbols = codebook.num_symbols();
    let tuple_bits = n.tuple_bits();
    let block_bits = tuple_bits * num_symbols;
    let dest_layer = topology.layer_of(destination);
    let y_tuples = unpack_block(reception, n, num_symbols)?;

    // relay ancestors grouped by layer
    let ancestors = relay_ancestors(topology, destination);
    let mut layer_nodes: Vec<Vec<usize>> = vec![Vec::new(); dest_layer as usize];
    for &v in &ancestors {
        let l = topology.layer_of(v);
        debug_assert!(l >= 1 && l < dest_layer);
        layer_nodes[l as usize].push(v);
    }
    for (l, nodes) in layer_nodes.iter().enumerate().skip(1) {
        let bits = block_bits * nodes.len();
        if bits as u32 > state_cap_bits {
            return Err(Error::MlStateCap {
                bits: bits as u32,
                cap_bits: state_cap_bits,
            });
        }
        let _ = l;
    }

    // per-node transition tables, parents in id order
    let mut tables: BTreeMap<usize, TransitionTable> = BTreeMap::new();
    for v in ancestors.iter().copied().chain([destination]) {
        let gains: Vec<Gain> = topology.parents(v).iter().map(|&(_, g)| g).collect();
        tables.insert(
            v,
            TransitionTable::build(&gains, n, tail_tol, 1 << 26)?,
        );
    }

    let extract_tuple = |state: u64, node_pos: usize, t: usize| -> u64 {
        state >> (node_pos * block_bits + t * tuple_bits) & ((1 << tuple_bits) - 1)
    };

    // probability that `node` receives the block encoded in `state` given its
    // parents' transmit tuples
    let reception_prob = |node: usize,
                          node_pos: usize,
                          state: u64,
                          parent_tuples: &BTreeMap<usize, Vec<BitTuple>>|
     -> f64 {
        let table = &tables[&node];
        let parents: Vec<usize> = topology.parents(node).iter().map(|&(p, _)| p).collect();
        let mut prob = 1.0;
        for t in 0..num_symbols {
            let config: Vec<BitTuple> = parents
                .iter()
                .map(|p| parent_tuples[p][t])
                .collect();
            let row = table.row(table.config_of(&config));
            prob *= row[extract_tuple(state, node_pos, t) as usize];
        }
        prob
    };

    let mut best: Option<(f64, u64)> = None;
    for message in 0..codebook.message_count() {
        let source_tuples = unpack_block(codebook.codeword(message), n, num_symbols)?;
        let mut transmit: BTreeMap<usize, Vec<BitTuple>> = BTreeMap::new();
        transmit.insert(0, source_tuples);

        // forward pass over intermediate layers
        let mut alpha: Vec<f64> = vec![1.0];
        let mut log_scale = 0.0f64;
        let mut states_transmits: Vec<BTreeMap<usize, Vec<BitTuple>>> = vec![transmit.clone()];

        for layer in 1..dest_layer {
            let nodes = &layer_nodes[layer as usize];
            if nodes.is_empty() {
                continue;
            }
            let state_count = 1u64 << (block_bits * nodes.len());
            let mut next = vec![0.0f64; state_count as usize];
            let mut next_transmits: Vec<BTreeMap<usize, Vec<BitTuple>>> =
                Vec::with_capacity(state_count as usize);
            for state in 0..state_count {
                // transmit tuples implied by this joint reception
                let mut tx = BTreeMap::new();
                for (pos, &node) in nodes.iter().enumerate() {
                    let mut block = BinaryVector::zeros(block_bits);
                    for b in 0..block_bits {
                        if state >> (pos * block_bits + b) & 1 == 1 {
                            block.set(b, true);
                        }
                    }
                    let tuples = match relays.matrix(node) {
                        Some(a) => relay_map(a, &block, n, num_symbols)?,
                        None => vec![BitTuple::zero(n); num_symbols],
                    };
                    tx.insert(node, tuples);
                }
                next_transmits.push(tx);
            }
            for (prev_state, &a) in alpha.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let prev_tx = &states_transmits[prev_state];
                for state in 0..state_count {
                    let mut p = a;
                    for (pos, &node) in nodes.iter().enumerate() {
                        p *= reception_prob(node, pos, state, prev_tx);
                        if p == 0.0 {
                            break;
                        }
                    }
                    next[state as usize] += p;
                }
            }
            let norm: f64 = next.iter().sum();
            if norm > 0.0 {
                for v in &mut next {
                    *v /= norm;
                }
                log_scale += norm.ln();
            }
            alpha = next;
            states_transmits = next_transmits;
        }

        // destination factor
        let dest_table = &tables[&destination];
        let dest_parents: Vec<usize> =
            topology.parents(destination).iter().map(|&(p, _)| p).collect();
        let mut total = 0.0f64;
        for (prev_state, &a) in alpha.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let prev_tx = &states_transmits[prev_state];
            let mut p = a;
            for t in 0..num_symbols {
                let config: Vec<BitTuple> =
                    dest_parents.iter().map(|q| prev_tx[q][t]).collect();
                let row = dest_table.row(dest_table.config_of(&config));
                p *= row[y_tuples[t].index() as usize];
                if p == 0.0 {
                    break;
                }
            }
            total += p;
        }
        let log_lik = if total > 0.0 {
            log_scale + total.ln()
        } else {
            f64::NEG_INFINITY
        };
        match best {
            Some((b, _)) if log_lik <= b => {}
            _ => best = Some((log_lik, message)),
        }
    }
    Ok(best.expect("codebook has at least one message").1)
}
