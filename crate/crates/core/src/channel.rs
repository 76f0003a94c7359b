//! Gaussian reception, the block-synchronous network simulator, and an exact
//! per-symbol transition-law oracle for the discrete network.
//!
//! Noise is circularly-symmetric complex Gaussian with unit total variance:
//! each real component is `N(0, 1/2)`. The transition oracle folds that
//! Gaussian through the quantizer exactly: for a deterministic signal `g`, the
//! probability that a component quantizes to `v` is the total mass of
//! `|g + Z|` over all integer cells `[m, m+1)` with `m = v (mod 2^n)`,
//! truncated once the remaining tail mass drops below a tolerance.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::discrete::{encode_symbol, pack_block, quantize, unpack_block, BitTuple};
use crate::gf2::{matvec, BinaryMatrix, BinaryVector};
use crate::topology::{Gain, Precision, Topology};
use crate::{Error, Result};

/// Default truncation tolerance for the fold sum.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// A source of complex noise samples.
pub trait NoiseSource {
    fn sample(&mut self) -> Complex64;
}

/// Circularly-symmetric complex Gaussian noise of unit total variance.
pub struct GaussianNoise<R> {
    rng: R,
}

impl<R: Rng> GaussianNoise<R> {
    pub fn new(rng: R) -> Self {
        Self { rng }
    }
}

impl<R: Rng> NoiseSource for GaussianNoise<R> {
    fn sample(&mut self) -> Complex64 {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
    }
}

/// Noiseless stub, for deterministic channel tests.
pub struct ZeroNoise;

impl NoiseSource for ZeroNoise {
    fn sample(&mut self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
}

/// One Gaussian multiple-access reception: sum of gain-weighted parent
/// transmissions plus a fresh noise sample.
pub fn propagate(
    topology: &Topology,
    transmissions: &BTreeMap<usize, Complex64>,
    receiver: usize,
    noise: &mut impl NoiseSource,
) -> Result<Complex64> {
    let mut y = noise.sample();
    for &(parent, gain) in topology.parents(receiver) {
        let x = transmissions
            .get(&parent)
            .ok_or(Error::MissingTransmission(parent))?;
        y += gain.as_complex() * x;
    }
    Ok(y)
}

/// Run one block through the layered schedule.
///
/// Layer-`k` nodes receive the `num_symbols` transmissions of layer `k-1`
/// through independent AWGN, quantize each reception to a tuple, adjoin the
/// tuples into their received block, and (if they carry a relay matrix)
/// transmit the matrix image of that block in the next step. Nodes with
/// outgoing edges but no matrix transmit the all-zero block. Returns every
/// non-source node's received block.
///
/// Noise is drawn in a fixed order (layers ascending, node ids ascending
/// within a layer, symbol times ascending), so the result is a deterministic
/// function of the noise source state.
pub fn simulate_network_block(
    topology: &Topology,
    source_block: &BinaryVector,
    relay_matrices: &BTreeMap<usize, BinaryMatrix>,
    n: Precision,
    num_symbols: usize,
    noise: &mut impl NoiseSource,
) -> Result<BTreeMap<usize, BinaryVector>> {
    let block_bits = n.tuple_bits() * num_symbols;
    if source_block.len() != block_bits {
        return Err(Error::DimensionMismatch {
            context: "source block",
            expected: block_bits,
            got: source_block.len(),
        });
    }
    for (node, m) in relay_matrices {
        if m.rows() != block_bits || m.cols() != block_bits {
            return Err(Error::DimensionMismatch {
                context: "relay matrix",
                expected: block_bits,
                got: if m.rows() != block_bits { m.rows() } else { m.cols() },
            });
        }
        debug_assert!(*node < topology.node_count());
    }

    // per-node transmit symbols for the layer currently on air
    let mut transmit_symbols: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
    transmit_symbols.insert(
        0,
        unpack_block(source_block, n, num_symbols)?
            .into_iter()
            .map(encode_symbol)
            .collect(),
    );

    let mut received = BTreeMap::new();
    for layer in 1..topology.layer_count() {
        let nodes = topology.nodes_in_layer(layer);
        let mut next_transmits: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
        for &node in &nodes {
            let mut tuples = Vec::with_capacity(num_symbols);
            for t in 0..num_symbols {
                let mut y = noise.sample();
                for &(parent, gain) in topology.parents(node) {
                    if let Some(symbols) = transmit_symbols.get(&parent) {
                        y += gain.as_complex() * symbols[t];
                    }
                    // parents without transmissions are silent off-schedule
                    // nodes; they contribute nothing
                }
                tuples.push(quantize(y, n));
            }
            let block = pack_block(&tuples)?;
            if !topology.children(node).is_empty() {
                let out_block = match relay_matrices.get(&node) {
                    Some(a) => matvec(a, &block)?,
                    None => BinaryVector::zeros(block_bits),
                };
                let symbols = unpack_block(&out_block, n, num_symbols)?
                    .into_iter()
                    .map(encode_symbol)
                    .collect();
                next_transmits.insert(node, symbols);
            }
            received.insert(node, block);
        }
        transmit_symbols = next_transmits;
    }
    Ok(received)
}

fn check_tail_tol(tail_tol: f64) -> Result<()> {
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return Err(Error::TailTolOutOfRange(tail_tol));
    }
    Ok(())
}

/// `P(g + Z in [a, b))` for `Z ~ N(0, 1/2)`.
#[inline]
fn gauss_mass(g: f64, a: f64, b: f64) -> f64 {
    // Phi_sigma(x) = 0.5 erfc(-x) for sigma^2 = 1/2
    0.5 * (libm::erfc(g - b) - libm::erfc(g - a))
}

/// Half-width of the interval around the signal that carries all but
/// `tail_tol` of the noise mass: `erfc(w) < tail_tol` for this `w`.
fn tail_window(tail_tol: f64) -> f64 {
    (1.0 / tail_tol).ln().sqrt() + 1.5
}

/// Exact per-component quantizer law: probabilities over `v in 0..2^n` that
/// `floor(|g + Z|) mod 2^n = v`, with the fold sum truncated at `tail_tol`.
///
/// The law depends on `g` only through its magnitude (the sign is folded away
/// with the noise), and all mass lives within a few noise widths of `|g|` and
/// of the fold at zero, so only those cells are summed.
pub fn component_law(g: f64, n: Precision, tail_tol: f64) -> Vec<f64> {
    let g = g.abs();
    let levels = n.component_levels();
    let mut probs = vec![0.0; levels as usize];
    let window = tail_window(tail_tol);
    let lo = (g - window).floor().max(0.0) as u64;
    let hi = (g + window).ceil() as u64;
    for m in lo..=hi {
        let a = m as f64;
        let b = a + 1.0;
        probs[(m % levels) as usize] += gauss_mass(g, a, b) + gauss_mass(g, -b, -a);
    }
    probs
}

/// Pointwise component law: `P(floor(|g + Z|) mod 2^n = v)`.
pub fn component_prob(v: u64, g: f64, n: Precision, tail_tol: f64) -> f64 {
    let levels = n.component_levels();
    debug_assert!(v < levels);
    let g = g.abs();
    let window = tail_window(tail_tol);
    // below the window around |g| only the fold branch at zero matters, and
    // it only matters while the cell is within the window of -|g| mirrored,
    // i.e. for m + g < window
    let mut m = v;
    let mut include_fold = true;
    if g > window {
        // fold cells are negligible; jump to the first m = v (mod 2^n) near g
        let first = (g - window).floor() as u64;
        if first > v {
            m = v + (first - v).div_ceil(levels) * levels;
        }
        include_fold = false;
    }
    let hi = g + window;
    let mut p = 0.0;
    while (m as f64) <= hi {
        let a = m as f64;
        let b = a + 1.0;
        p += gauss_mass(g, a, b);
        if include_fold && g + a < window {
            p += gauss_mass(g, -b, -a);
        }
        m += levels;
    }
    p
}

/// Deterministic part of a reception: the gain-weighted sum of the encoded
/// parent tuples.
pub fn signal_sum(parent_gains: &[Gain], parent_tuples: &[BitTuple]) -> Complex64 {
    debug_assert_eq!(parent_gains.len(), parent_tuples.len());
    parent_gains
        .iter()
        .zip(parent_tuples)
        .map(|(g, t)| g.as_complex() * encode_symbol(*t))
        .sum()
}

/// Exact law of the received tuple given the parents' transmitted tuples:
/// a probability vector over the `2^(2n)` output tuples, indexed by
/// [`BitTuple::index`]. Real and imaginary components are independent, so the
/// joint law is the outer product of the two component laws.
pub fn transition_probabilities(
    parent_gains: &[Gain],
    parent_tuples: &[BitTuple],
    n: Precision,
    tail_tol: f64,
) -> Result<Vec<f64>> {
    check_tail_tol(tail_tol)?;
    if parent_gains.len() != parent_tuples.len() {
        return Err(Error::DimensionMismatch {
            context: "transition parents",
            expected: parent_gains.len(),
            got: parent_tuples.len(),
        });
    }
    let g = signal_sum(parent_gains, parent_tuples);
    let pr = component_law(g.re, n, tail_tol);
    let pi = component_law(g.im, n, tail_tol);
    let levels = n.component_levels() as usize;
    let mut out = vec![0.0; n.tuple_alphabet()];
    for (vi, &qi) in pi.iter().enumerate() {
        for (vr, &qr) in pr.iter().enumerate() {
            out[vr + (vi * levels)] = qr * qi;
        }
    }
    Ok(out)
}

/// Exact per-symbol channel law of one receiver, tabulated over every parent
/// tuple configuration.
///
/// Configuration index: with parents ordered as given, configuration
/// `(t_0, ..., t_{q-1})` has index `sum_i t_i.index() * 2^(2n i)`.
#[derive(Debug, Clone)]
pub struct TransitionTable {
    n: Precision,
    tail_tol: f64,
    parent_count: usize,
    rows: Vec<Vec<f64>>,
}

impl TransitionTable {
    /// Tabulate the law for a receiver with the given parent gains.
    ///
    /// Errors when `(2^(2n))^q * 2^(2n)` table entries would exceed
    /// `max_entries`.
    pub fn build(
        parent_gains: &[Gain],
        n: Precision,
        tail_tol: f64,
        max_entries: u64,
    ) -> Result<Self> {
        check_tail_tol(tail_tol)?;
        let alpha_bits = 2 * n.get() as u64;
        let total_bits = alpha_bits * (parent_gains.len() as u64 + 1);
        if total_bits >= 63 || 1u64 << total_bits > max_entries {
            return Err(Error::EnumerationCap {
                bits: total_bits.min(u32::MAX as u64) as u32,
                cap_bits: 63.min(max_entries.ilog2()),
            });
        }
        let configs = 1u64 << (alpha_bits * parent_gains.len() as u64);
        let mut rows = Vec::with_capacity(configs as usize);
        let mut tuples = vec![BitTuple::zero(n); parent_gains.len()];
        for config in 0..configs {
            for (i, t) in tuples.iter_mut().enumerate() {
                let idx = config >> (alpha_bits * i as u64) & ((1 << alpha_bits) - 1);
                *t = BitTuple::from_index(idx, n);
            }
            rows.push(transition_probabilities(parent_gains, &tuples, n, tail_tol)?);
        }
        Ok(Self {
            n,
            tail_tol,
            parent_count: parent_gains.len(),
            rows,
        })
    }

    pub fn precision(&self) -> Precision {
        self.n
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn parent_count(&self) -> usize {
        self.parent_count
    }

    pub fn config_count(&self) -> usize {
        self.rows.len()
    }

    /// Configuration index of an ordered tuple assignment.
    pub fn config_of(&self, tuples: &[BitTuple]) -> u64 {
        debug_assert_eq!(tuples.len(), self.parent_count);
        let alpha_bits = 2 * self.n.get() as u64;
        tuples
            .iter()
            .enumerate()
            .map(|(i, t)| t.index() << (alpha_bits * i as u64))
            .sum()
    }

    /// The output law for one parent configuration.
    pub fn row(&self, config: u64) -> &[f64] {
        &self.rows[config as usize]
    }

    /// Average output law under i.i.d. uniform parent tuples.
    pub fn uniform_input_output_law(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n.tuple_alphabet()];
        let w = 1.0 / self.rows.len() as f64;
        for row in &self.rows {
            for (o, p) in out.iter_mut().zip(row) {
                *o += w * p;
            }
        }
        out
    }
}
