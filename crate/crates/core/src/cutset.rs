//! Cut mutual informations and cut-set bounds.
//!
//! Two per-cut quantities are computed. The Gaussian side is the i.i.d.
//! complex-Gaussian-input proxy `log2 det(I + s H H*)` where `H` is the
//! channel transfer matrix across the cut. The discrete side is the per-symbol
//! mutual information `I(x_Omega; y'_{Omega^c} | x_{Omega^c})` of the discrete
//! network under i.i.d. uniform inputs at every node.
//!
//! Because all inputs are independent and each reception depends only on the
//! previous layer, the discrete cut MI splits exactly into one term per layer,
//! `I(x_F; y_G | x_C)` with `F` the cut-side senders, `G` the far-side
//! receivers and `C` the far-side interferers of that layer. Each term is
//! evaluated exactly when its enumeration fits the configured caps and by
//! Monte Carlo otherwise: an unbiased estimator that scores simulated outputs
//! against the exactly-enumerated input mixture when the sender alphabet is
//! small, and a bias-corrected plug-in entropy estimator when only the
//! receiver alphabet is small.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{component_law, component_prob};
use crate::discrete::{encode_symbol, quantize, BitTuple};
use crate::seeding::{derive, Domain};
use crate::topology::{
    compute_precision, enumerate_cuts, Cut, Gain, Precision, Topology, DEFAULT_CUT_CAP_LOG2,
};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::FRAC_1_SQRT_2;

// ---------------------------------------------------------------------------
// Gaussian side
// ---------------------------------------------------------------------------

/// Channel transfer matrix across a cut: rows are far-side receivers with at
/// least one in-edge from the cut side, columns are cut-side transmitters with
/// at least one edge into the far side.
#[derive(Debug, Clone)]
pub struct CutTransferMatrix {
    pub receivers: Vec<usize>,
    pub transmitters: Vec<usize>,
    /// Row-major `receivers.len() x transmitters.len()` entries.
    pub entries: Vec<Complex64>,
}

impl CutTransferMatrix {
    pub fn build(topology: &Topology, cut: &Cut) -> Result<Self> {
        let nodes = topology.node_count();
        let transmitters: Vec<usize> = (0..nodes)
            .filter(|&v| {
                cut.contains(v) && topology.children(v).iter().any(|&c| !cut.contains(c))
            })
            .collect();
        let receivers: Vec<usize> = (0..nodes)
            .filter(|&v| {
                !cut.contains(v) && topology.parents(v).iter().any(|&(p, _)| cut.contains(p))
            })
            .collect();
        let mut entries = vec![Complex64::new(0.0, 0.0); receivers.len() * transmitters.len()];
        for (r, &rx) in receivers.iter().enumerate() {
            for (c, &tx) in transmitters.iter().enumerate() {
                if let Some(g) = topology.gain(tx, rx) {
                    if !g.is_finite() {
                        return Err(Error::NonFiniteGain { from: tx, to: rx });
                    }
                    entries[r * transmitters.len() + c] = g.as_complex();
                }
            }
        }
        Ok(Self {
            receivers,
            transmitters,
            entries,
        })
    }
}

/// `log2 det(I + power_scale * H H*)` for a row-major `rows x cols` complex
/// matrix, via a Cholesky factorization of the Hermitian positive-definite
/// Gram form.
pub fn logdet2_identity_plus_gram(
    rows: usize,
    cols: usize,
    entries: &[Complex64],
    power_scale: f64,
) -> f64 {
    assert_eq!(entries.len(), rows * cols);
    assert!(power_scale > 0.0);
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    // A = I + s H H*
    let mut a = vec![Complex64::new(0.0, 0.0); rows * rows];
    for i in 0..rows {
        for j in 0..rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..cols {
                acc += entries[i * cols + k] * entries[j * cols + k].conj();
            }
            a[i * rows + j] = acc * power_scale;
        }
        a[i * rows + i] += 1.0;
    }
    // in-place lower Cholesky; the diagonal of L carries the determinant
    let mut logdet = 0.0;
    let mut l = vec![Complex64::new(0.0, 0.0); rows * rows];
    for i in 0..rows {
        for j in 0..=i {
            let mut sum = a[i * rows + j];
            for k in 0..j {
                sum -= l[i * rows + k] * l[j * rows + k].conj();
            }
            if i == j {
                let d = sum.re.max(f64::MIN_POSITIVE);
                let root = d.sqrt();
                l[i * rows + i] = Complex64::new(root, 0.0);
                logdet += 2.0 * root.log2();
            } else {
                l[i * rows + j] = sum / l[j * rows + j].re;
            }
        }
    }
    logdet
}

/// Gaussian cut mutual information in bits per symbol at the given signal
/// power scale (1 for the unit-power proxy, 1/3 for the reduced-power form).
pub fn gaussian_cut_mi(topology: &Topology, cut: &Cut, power_scale: f64) -> Result<f64> {
    let h = CutTransferMatrix::build(topology, cut)?;
    Ok(logdet2_identity_plus_gram(
        h.receivers.len(),
        h.transmitters.len(),
        &h.entries,
        power_scale,
    ))
}

// ---------------------------------------------------------------------------
// Discrete side: per-layer decomposition
// ---------------------------------------------------------------------------

/// Caps and sampling parameters for cut MI evaluation.
#[derive(Debug, Clone)]
pub struct CutsetConfig {
    /// Precision override; derived from the gains via `compute_precision`
    /// when absent.
    pub precision: Option<Precision>,
    pub tail_tol: f64,
    /// Per-term cap on exact enumeration: `2n(|F| + |C| + |G|)` bits.
    pub exact_total_bits_cap: u32,
    /// Per-term cap on the exactly-enumerated sender mixture in the Monte
    /// Carlo estimator: `2n|F|` bits.
    pub mixture_bits_cap: u32,
    /// Per-term cap on the receiver alphabet in the plug-in estimator.
    pub counts_bits_cap: u32,
    /// Monte Carlo sample count per term.
    pub mc_samples: usize,
    /// Bootstrap replicates for the reported 95% width.
    pub bootstrap_reps: usize,
    pub seed: u64,
    pub cut_cap_log2: u32,
}

impl Default for CutsetConfig {
    fn default() -> Self {
        Self {
            precision: None,
            tail_tol: crate::channel::DEFAULT_TAIL_TOL,
            exact_total_bits_cap: 24,
            mixture_bits_cap: 20,
            counts_bits_cap: 20,
            mc_samples: 20_000,
            bootstrap_reps: 200,
            seed: 0,
            cut_cap_log2: DEFAULT_CUT_CAP_LOG2,
        }
    }
}

/// One layer's contribution `I(x_F; y_G | x_C)` to a cut MI.
#[derive(Debug, Clone)]
struct TermSpec {
    /// Cut-side senders (sorted node ids).
    senders: Vec<usize>,
    /// Far-side interferers (sorted node ids).
    conditioned: Vec<usize>,
    receivers: Vec<ReceiverSpec>,
}

#[derive(Debug, Clone)]
struct ReceiverSpec {
    /// `(slot in senders, gain)` for cut-side parents.
    f_parents: Vec<(usize, Gain)>,
    /// `(slot in conditioned, gain)` for far-side parents.
    c_parents: Vec<(usize, Gain)>,
}

fn layer_terms(topology: &Topology, cut: &Cut) -> Vec<TermSpec> {
    let mut terms = Vec::new();
    for layer in 1..topology.layer_count() {
        let receivers: Vec<usize> = topology
            .nodes_in_layer(layer)
            .into_iter()
            .filter(|&v| {
                !cut.contains(v)
                    && topology.parents(v).iter().any(|&(p, _)| cut.contains(p))
            })
            .collect();
        if receivers.is_empty() {
            continue;
        }
        let mut senders = Vec::new();
        let mut conditioned = Vec::new();
        for &r in &receivers {
            for &(p, _) in topology.parents(r) {
                if cut.contains(p) {
                    if !senders.contains(&p) {
                        senders.push(p);
                    }
                } else if !conditioned.contains(&p) {
                    conditioned.push(p);
                }
            }
        }
        senders.sort_unstable();
        conditioned.sort_unstable();
        let specs = receivers
            .iter()
            .map(|&r| {
                let mut f_parents = Vec::new();
                let mut c_parents = Vec::new();
                for &(p, g) in topology.parents(r) {
                    if cut.contains(p) {
                        f_parents.push((senders.iter().position(|&s| s == p).unwrap(), g));
                    } else {
                        c_parents.push((conditioned.iter().position(|&s| s == p).unwrap(), g));
                    }
                }
                ReceiverSpec { f_parents, c_parents }
            })
            .collect();
        terms.push(TermSpec {
            senders,
            conditioned,
            receivers: specs,
        });
    }
    terms
}

fn tuple_at(config: u64, slot: usize, n: Precision) -> BitTuple {
    let bits = n.tuple_bits();
    BitTuple::from_index(config >> (slot * bits) & ((1u64 << bits) - 1), n)
}

/// Deterministic reception component of one receiver given sender and
/// interferer configurations.
fn receiver_signal(
    spec: &ReceiverSpec,
    f_config: u64,
    c_config: u64,
    n: Precision,
) -> Complex64 {
    let mut g = Complex64::new(0.0, 0.0);
    for &(slot, gain) in &spec.f_parents {
        g += gain.as_complex() * encode_symbol(tuple_at(f_config, slot, n));
    }
    for &(slot, gain) in &spec.c_parents {
        g += gain.as_complex() * encode_symbol(tuple_at(c_config, slot, n));
    }
    g
}

fn entropy_bits(law: &[f64]) -> f64 {
    law.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Exact evaluation of one layer term.
fn term_exact(spec: &TermSpec, n: Precision, cfg: &CutsetConfig) -> Result<f64> {
    let tb = n.tuple_bits();
    let bits_f = tb * spec.senders.len();
    let bits_c = tb * spec.conditioned.len();
    let bits_g = tb * spec.receivers.len();
    let total = (bits_f + bits_c + bits_g) as u32;
    if total > cfg.exact_total_bits_cap {
        return Err(Error::EnumerationCap {
            bits: total,
            cap_bits: cfg.exact_total_bits_cap,
        });
    }
    let alphabet = n.tuple_alphabet();
    let f_configs = 1u64 << bits_f;
    let c_configs = 1u64 << bits_c;
    let y_configs = 1usize << bits_g;
    let f_weight = 1.0 / f_configs as f64;

    let mut total_mi = 0.0;
    for c_config in 0..c_configs {
        let mut p_y = vec![0.0f64; y_configs];
        let mut cond_entropy = 0.0;
        let mut laws: Vec<Vec<f64>> = vec![Vec::new(); spec.receivers.len()];
        for f_config in 0..f_configs {
            for (j, rspec) in spec.receivers.iter().enumerate() {
                let g = receiver_signal(rspec, f_config, c_config, n);
                let pr = component_law(g.re, n, cfg.tail_tol);
                let pi = component_law(g.im, n, cfg.tail_tol);
                cond_entropy += f_weight * (entropy_bits(&pr) + entropy_bits(&pi));
                let mut joint = vec![0.0f64; alphabet];
                for (vi, &qi) in pi.iter().enumerate() {
                    for (vr, &qr) in pr.iter().enumerate() {
                        joint[vr + (vi << n.get())] = qr * qi;
                    }
                }
                laws[j] = joint;
            }
            for (y, slot) in p_y.iter_mut().enumerate() {
                let mut prod = f_weight;
                for (j, law) in laws.iter().enumerate() {
                    prod *= law[y >> (tb * j) & (alphabet - 1)];
                    if prod == 0.0 {
                        break;
                    }
                }
                *slot += prod;
            }
        }
        total_mi += entropy_bits(&p_y) - cond_entropy;
    }
    Ok(total_mi / c_configs as f64)
}


/// Per-term Monte Carlo outcome: the sample mean plus per-sample material for
/// bootstrapping.
enum TermSamples {
    /// Exactly computed; no sampling variability.
    Exact(f64),
    /// Per-sample values of an unbiased integrand; the estimate is the mean.
    Values(Vec<f64>),
    /// Plug-in entropy samples: per-sample `(joint output index, conditional
    /// entropy)`; the estimate is `H_plugin({y}) + MM - mean(h)`.
    Counts(Vec<(u64, f64)>),
}

impl TermSamples {
    fn estimate(&self) -> f64 {
        match self {
            TermSamples::Exact(v) => *v,
            TermSamples::Values(vals) => vals.iter().sum::<f64>() / vals.len() as f64,
            TermSamples::Counts(samples) => {
                let ys: Vec<u64> = samples.iter().map(|&(y, _)| y).collect();
                let h_y = plugin_entropy_mm(&ys);
                let h_cond =
                    samples.iter().map(|&(_, h)| h).sum::<f64>() / samples.len() as f64;
                h_y - h_cond
            }
        }
    }
}

/// Miller-Madow corrected plug-in entropy of a sample of discrete values.
fn plugin_entropy_mm(samples: &[u64]) -> f64 {
    let mut counts: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
    for &s in samples {
        *counts.entry(s).or_insert(0) += 1;
    }
    let total = samples.len() as f64;
    let h: f64 = counts
        .values()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    h + (counts.len() as f64 - 1.0) / (2.0 * total * std::f64::consts::LN_2)
}

/// Monte Carlo evaluation of one layer term.
fn term_mc(
    spec: &TermSpec,
    n: Precision,
    cfg: &CutsetConfig,
    term_seed: u64,
) -> Result<TermSamples> {
    let tb = n.tuple_bits();
    let bits_f = (tb * spec.senders.len()) as u32;
    let bits_c = (tb * spec.conditioned.len()) as u32;
    let bits_g = (tb * spec.receivers.len()) as u32;

    if bits_f <= cfg.mixture_bits_cap {
        // unbiased: score simulated outputs against the exact sender mixture
        let f_configs = 1u64 << bits_f;
        // budget: keep per-term work near 2^26 pointwise evaluations
        let budget = (1u64 << 26) >> bits_f.min(25);
        let samples = cfg.mc_samples.min(budget.max(1000) as usize);

        // per-receiver deterministic signal over the sender grid
        let f_signals: Vec<Vec<Complex64>> = spec
            .receivers
            .iter()
            .map(|rspec| {
                (0..f_configs)
                    .map(|f| {
                        let mut g = Complex64::new(0.0, 0.0);
                        for &(slot, gain) in &rspec.f_parents {
                            g += gain.as_complex() * encode_symbol(tuple_at(f, slot, n));
                        }
                        g
                    })
                    .collect()
            })
            .collect();

        let values: Vec<f64> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = derive(cfg.seed, Domain::CutsetMc, term_seed << 24 | i as u64);
                let c_config: u64 = if bits_c == 0 {
                    0
                } else {
                    rng.random::<u64>() & ((1u64 << bits_c) - 1)
                };
                let f_config: u64 = rng.random::<u64>() & (f_configs - 1);
                // interferer offsets
                let offsets: Vec<Complex64> = spec
                    .receivers
                    .iter()
                    .map(|rspec| {
                        let mut d = Complex64::new(0.0, 0.0);
                        for &(slot, gain) in &rspec.c_parents {
                            d += gain.as_complex() * encode_symbol(tuple_at(c_config, slot, n));
                        }
                        d
                    })
                    .collect();
                // simulate the receptions
                let observed: Vec<(u64, u64)> = spec
                    .receivers
                    .iter()
                    .enumerate()
                    .map(|(j, _)| {
                        let g = f_signals[j][f_config as usize] + offsets[j];
                        let zr: f64 = StandardNormal.sample(&mut rng);
                        let zi: f64 = StandardNormal.sample(&mut rng);
                        let y = Complex64::new(
                            g.re + zr * FRAC_1_SQRT_2,
                            g.im + zi * FRAC_1_SQRT_2,
                        );
                        let t = quantize(y, n);
                        (t.re_value(), t.im_value())
                    })
                    .collect();
                // log p(y | f, c) and log of the mixture over all senders
                let mut log_num = 0.0;
                for (j, &(vr, vi)) in observed.iter().enumerate() {
                    let g = f_signals[j][f_config as usize] + offsets[j];
                    log_num += (component_prob(vr, g.re, n, cfg.tail_tol)
                        * component_prob(vi, g.im, n, cfg.tail_tol))
                    .log2();
                }
                let mut mix = 0.0f64;
                for f in 0..f_configs {
                    let mut p = 1.0;
                    for (j, &(vr, vi)) in observed.iter().enumerate() {
                        let g = f_signals[j][f as usize] + offsets[j];
                        p *= component_prob(vr, g.re, n, cfg.tail_tol)
                            * component_prob(vi, g.im, n, cfg.tail_tol);
                        if p == 0.0 {
                            break;
                        }
                    }
                    mix += p;
                }
                let log_den = (mix / f_configs as f64).log2();
                log_num - log_den
            })
            .collect();
        return Ok(TermSamples::Values(values));
    }

    if bits_g <= cfg.counts_bits_cap && spec.conditioned.is_empty() && bits_f <= 62 {
        // plug-in receiver entropy minus exact conditional entropies
        let samples = cfg.mc_samples.min(1 << 24);
        let pairs: Vec<(u64, f64)> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = derive(cfg.seed, Domain::CutsetMc, term_seed << 24 | i as u64);
                let f_config: u64 = rng.random::<u64>() & ((1u64 << bits_f) - 1);
                let mut y_joint = 0u64;
                let mut h_cond = 0.0;
                for (j, rspec) in spec.receivers.iter().enumerate() {
                    let g = receiver_signal(rspec, f_config, 0, n);
                    let pr = component_law(g.re, n, cfg.tail_tol);
                    let pi = component_law(g.im, n, cfg.tail_tol);
                    h_cond += entropy_bits(&pr) + entropy_bits(&pi);
                    let zr: f64 = StandardNormal.sample(&mut rng);
                    let zi: f64 = StandardNormal.sample(&mut rng);
                    let y = Complex64::new(
                        g.re + zr * FRAC_1_SQRT_2,
                        g.im + zi * FRAC_1_SQRT_2,
                    );
                    y_joint |= quantize(y, n).index() << (tb * j);
                }
                (y_joint, h_cond)
            })
            .collect();
        return Ok(TermSamples::Counts(pairs));
    }

    Err(Error::TermTooLarge(format!(
        "senders {} bits, receivers {} bits, interferers {} bits",
        bits_f, bits_g, bits_c
    )))
}

/// A Monte Carlo mutual-information estimate with a bootstrap 95% width.
#[derive(Debug, Clone, Copy)]
pub struct MiEstimate {
    pub bits: f64,
    /// Full width of the bootstrap 95% interval; zero for exact values.
    pub width95: f64,
    /// Whether every term was computed exactly.
    pub exact: bool,
}

fn combine_terms(terms: &[TermSamples], cfg: &CutsetConfig, seed: u64) -> MiEstimate {
    let bits: f64 = terms.iter().map(|t| t.estimate()).sum();
    let all_exact = terms.iter().all(|t| matches!(t, TermSamples::Exact(_)));
    if all_exact {
        return MiEstimate { bits, width95: 0.0, exact: true };
    }
    let reps = cfg.bootstrap_reps;
    let mut totals = Vec::with_capacity(reps);
    let mut rng = derive(cfg.seed, Domain::Bootstrap, seed);
    for _ in 0..reps {
        let mut total = 0.0;
        for term in terms {
            total += match term {
                TermSamples::Exact(v) => *v,
                TermSamples::Values(vals) => {
                    let s = vals.len();
                    (0..s).map(|_| vals[rng.random_range(0..s)]).sum::<f64>() / s as f64
                }
                TermSamples::Counts(samples) => {
                    let s = samples.len();
                    let resampled: Vec<(u64, f64)> =
                        (0..s).map(|_| samples[rng.random_range(0..s)]).collect();
                    let ys: Vec<u64> = resampled.iter().map(|&(y, _)| y).collect();
                    let h_cond =
                        resampled.iter().map(|&(_, h)| h).sum::<f64>() / s as f64;
                    plugin_entropy_mm(&ys) - h_cond
                }
            };
        }
        totals.push(total);
    }
    totals.sort_by(|a, b| a.total_cmp(b));
    let lo = totals[(reps as f64 * 0.025) as usize];
    let hi = totals[((reps as f64 * 0.975) as usize).min(reps - 1)];
    MiEstimate { bits, width95: hi - lo, exact: false }
}

fn resolve_precision(topology: &Topology, cfg: &CutsetConfig) -> Result<Precision> {
    match cfg.precision {
        Some(n) => Ok(n),
        None => compute_precision(topology),
    }
}

/// Exact per-symbol discrete cut MI; errors when any layer term exceeds the
/// enumeration cap (use [`discrete_cut_mi_mc`] then).
pub fn discrete_cut_mi_exact(
    topology: &Topology,
    cut: &Cut,
    n: Precision,
    cfg: &CutsetConfig,
) -> Result<f64> {
    let mut total = 0.0;
    for spec in layer_terms(topology, cut) {
        total += term_exact(&spec, n, cfg)?;
    }
    Ok(total)
}

/// Monte Carlo per-symbol discrete cut MI with a bootstrap 95% width.
pub fn discrete_cut_mi_mc(
    topology: &Topology,
    cut: &Cut,
    n: Precision,
    cfg: &CutsetConfig,
) -> Result<MiEstimate> {
    assert!(cfg.mc_samples >= 1000, "at least 1000 samples required");
    let specs = layer_terms(topology, cut);
    let mut terms = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        terms.push(term_mc(spec, n, cfg, cut.omega << 8 | i as u64)?);
    }
    let mut est = combine_terms(&terms, cfg, cut.omega);
    est.exact = false;
    Ok(est)
}

/// Exact where the caps allow, Monte Carlo elsewhere, per layer term.
pub fn discrete_cut_mi_auto(
    topology: &Topology,
    cut: &Cut,
    n: Precision,
    cfg: &CutsetConfig,
) -> Result<MiEstimate> {
    let specs = layer_terms(topology, cut);
    let mut terms = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        match term_exact(&spec, n, cfg) {
            Ok(v) => terms.push(TermSamples::Exact(v)),
            Err(Error::EnumerationCap { .. }) => {
                terms.push(term_mc(spec, n, cfg, cut.omega << 8 | i as u64)?)
            }
            Err(e) => return Err(e),
        }
    }
    Ok(combine_terms(&terms, cfg, cut.omega))
}

// ---------------------------------------------------------------------------
// Bounds and reports
// ---------------------------------------------------------------------------

/// Which per-cut quantities to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiMode {
    Gaussian,
    Discrete,
    Both,
}

/// How to evaluate the discrete side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscreteStrategy {
    Exact,
    MonteCarlo,
    Auto,
}

/// One evaluated cut.
#[derive(Debug, Clone)]
pub struct CutRow {
    pub cut: Cut,
    pub gaussian_bits: Option<f64>,
    pub discrete: Option<MiEstimate>,
}

/// All cuts for one destination, with the achieved minima.
#[derive(Debug, Clone)]
pub struct CutReport {
    pub destination: usize,
    pub rows: Vec<CutRow>,
}

impl CutReport {
    pub fn gaussian_min(&self) -> Option<(f64, Cut)> {
        self.rows
            .iter()
            .filter_map(|r| r.gaussian_bits.map(|b| (b, r.cut)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
    }

    pub fn discrete_min(&self) -> Option<(MiEstimate, Cut)> {
        self.rows
            .iter()
            .filter_map(|r| r.discrete.map(|e| (e, r.cut)))
            .min_by(|a, b| a.0.bits.total_cmp(&b.0.bits))
    }

    /// CSV rows `cut_bitmask, gaussian_bits, discrete_bits, discrete_ci` plus
    /// a trailing `min` summary row.
    pub fn to_csv(&self) -> String {
        let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.9}")).unwrap_or_default();
        let mut out = String::from("cut_bitmask,gaussian_bits,discrete_bits,discrete_ci\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.cut.omega,
                fmt_opt(row.gaussian_bits),
                fmt_opt(row.discrete.map(|e| e.bits)),
                fmt_opt(row.discrete.map(|e| e.width95)),
            ));
        }
        out.push_str(&format!(
            "min,{},{},{}\n",
            fmt_opt(self.gaussian_min().map(|(b, _)| b)),
            fmt_opt(self.discrete_min().map(|(e, _)| e.bits)),
            fmt_opt(self.discrete_min().map(|(e, _)| e.width95)),
        ));
        out
    }
}

/// Evaluate the chosen per-cut mutual informations on every cut separating
/// the source from `destination` and report the minima.
pub fn cutset_bound(
    topology: &Topology,
    mode: MiMode,
    strategy: DiscreteStrategy,
    destination: usize,
    cfg: &CutsetConfig,
) -> Result<CutReport> {
    let cuts = enumerate_cuts(topology, destination, cfg.cut_cap_log2)?;
    let n = if mode == MiMode::Gaussian {
        None
    } else {
        Some(resolve_precision(topology, cfg)?)
    };
    let rows: Vec<Result<CutRow>> = cuts
        .par_iter()
        .map(|cut| {
            let gaussian_bits = if mode != MiMode::Discrete {
                Some(gaussian_cut_mi(topology, cut, 1.0)?)
            } else {
                None
            };
            let discrete = if mode != MiMode::Gaussian {
                let n = n.unwrap();
                Some(match strategy {
                    DiscreteStrategy::Exact => MiEstimate {
                        bits: discrete_cut_mi_exact(topology, cut, n, cfg)?,
                        width95: 0.0,
                        exact: true,
                    },
                    DiscreteStrategy::MonteCarlo => discrete_cut_mi_mc(topology, cut, n, cfg)?,
                    DiscreteStrategy::Auto => discrete_cut_mi_auto(topology, cut, n, cfg)?,
                })
            } else {
                None
            };
            Ok(CutRow { cut: *cut, gaussian_bits, discrete })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CutReport { destination, rows })
}

/// Multicast bound: the minimum of the per-destination bounds.
#[derive(Debug, Clone)]
pub struct MulticastReport {
    pub per_destination: Vec<CutReport>,
}

impl MulticastReport {
    pub fn gaussian_bits(&self) -> Option<f64> {
        self.per_destination
            .iter()
            .filter_map(|r| r.gaussian_min().map(|(b, _)| b))
            .min_by(f64::total_cmp)
    }

    pub fn discrete_bits(&self) -> Option<f64> {
        self.per_destination
            .iter()
            .filter_map(|r| r.discrete_min().map(|(e, _)| e.bits))
            .min_by(f64::total_cmp)
    }
}

pub fn multicast_bound(
    topology: &Topology,
    mode: MiMode,
    strategy: DiscreteStrategy,
    cfg: &CutsetConfig,
) -> Result<MulticastReport> {
    let mut per_destination = Vec::new();
    for &d in topology.destinations() {
        per_destination.push(cutset_bound(topology, mode, strategy, d, cfg)?);
    }
    if per_destination.is_empty() {
        return Err(Error::Config("multicast bound needs a destination".into()));
    }
    Ok(MulticastReport { per_destination })
}

/// One row of a gain-scaling sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub k: i32,
    pub n: u32,
    pub gaussian_bits: f64,
    pub discrete_bits: f64,
    pub discrete_width: f64,
    pub gap_bits: f64,
}

/// Scale all gains by `2^k` for each exponent, recompute the precision and
/// both bounds, and report the per-exponent gap.
pub fn gap_sweep(
    topology: &Topology,
    destination: usize,
    exponents: &[i32],
    cfg: &CutsetConfig,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(exponents.len());
    for &k in exponents {
        let scaled = topology.scaled_gains_pow2(k);
        let n = compute_precision(&scaled)?;
        let mut cfg_k = cfg.clone();
        cfg_k.precision = Some(n);
        let report = cutset_bound(
            &scaled,
            MiMode::Both,
            DiscreteStrategy::Auto,
            destination,
            &cfg_k,
        )?;
        let (g, _) = report.gaussian_min().expect("gaussian bound");
        let (d, _) = report.discrete_min().expect("discrete bound");
        rows.push(SweepRow {
            k,
            n: n.get(),
            gaussian_bits: g,
            discrete_bits: d.bits,
            discrete_width: d.width95,
            gap_bits: g - d.bits,
        });
    }
    Ok(rows)
}

/// Sweep rows as CSV.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("k,n,cs_g_bits,cs_d_bits,cs_d_ci,gap_bits\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.9},{:.9},{:.9},{:.9}\n",
            r.k, r.n, r.gaussian_bits, r.discrete_bits, r.discrete_width, r.gap_bits
        ));
    }
    out
}
