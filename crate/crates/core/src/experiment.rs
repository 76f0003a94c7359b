//! Seeded block-error-rate experiments.
//!
//! All randomness in a run flows from one master seed: the codebook, the
//! relay matrices, and per-trial streams for the message draw, the channel
//! noise, and the decoder's association sampling. Trials are independent and
//! fan out across worker threads; because every trial owns its derived
//! streams and results aggregate as counts, the outcome is byte-identical
//! for any thread count.

use rand::RngCore;
use rayon::prelude::*;

use crate::channel::{simulate_network_block, GaussianNoise, DEFAULT_TAIL_TOL};
use crate::lincode::{
    decode_ml_exact, decode_typicality, generate_codebook, Codebook, DecoderContext,
    RelayCodeAssignment, TypicalityParams, DEFAULT_CODEBOOK_CAP_BITS,
    DEFAULT_ML_STATE_CAP_BITS,
};
use crate::seeding::{derive, Domain};
use crate::topology::{compute_precision, Precision, Topology};
use crate::{Error, Result};

/// Decoder selection for an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    MlExact,
    Typicality,
}

impl DecoderKind {
    pub fn label(self) -> &'static str {
        match self {
            DecoderKind::MlExact => "ml-exact",
            DecoderKind::Typicality => "typicality",
        }
    }
}

/// Parameters of one block-error-rate experiment.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    /// Block length in symbols (`N`).
    pub num_symbols: usize,
    /// Message bits per block (`B`); the rate is `B / N` bits per symbol.
    pub message_bits: u32,
    pub trials: u64,
    pub decoder: DecoderKind,
    pub epsilon: f64,
    /// Association samples per message (`L`), typicality decoder only.
    pub assoc_samples: usize,
    pub seed: u64,
    /// Precision override; derived from the gains when absent.
    pub precision: Option<Precision>,
    pub tail_tol: f64,
    pub ml_state_cap_bits: u32,
    /// Worker thread count; the global pool when absent.
    pub threads: Option<usize>,
}

impl SimulationConfig {
    pub fn new(num_symbols: usize, message_bits: u32, trials: u64, seed: u64) -> Self {
        Self {
            num_symbols,
            message_bits,
            trials,
            decoder: DecoderKind::MlExact,
            epsilon: 0.25,
            assoc_samples: 64,
            seed,
            precision: None,
            tail_tol: DEFAULT_TAIL_TOL,
            ml_state_cap_bits: DEFAULT_ML_STATE_CAP_BITS,
            threads: None,
        }
    }
}

/// Aggregated outcome of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub num_symbols: usize,
    pub message_bits: u32,
    pub decoder: DecoderKind,
    pub trials: u64,
    pub errors: u64,
    pub bler: f64,
    pub wilson95_lo: f64,
    pub wilson95_hi: f64,
}

impl SimulationResult {
    /// CSV with the header `N,B,decoder,trials,errors,bler,wilson95_lo,wilson95_hi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,B,decoder,trials,errors,bler,wilson95_lo,wilson95_hi\n");
        out.push_str(&format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6}\n",
            self.num_symbols,
            self.message_bits,
            self.decoder.label(),
            self.trials,
            self.errors,
            self.bler,
            self.wilson95_lo,
            self.wilson95_hi,
        ));
        out
    }

    /// Wilson intervals overlap, so the two rates are statistically
    /// indistinguishable at this sample size.
    pub fn wilson_overlaps(&self, other: &SimulationResult) -> bool {
        self.wilson95_lo <= other.wilson95_hi && other.wilson95_lo <= self.wilson95_hi
    }
}

/// 95% Wilson score interval for `errors` successes in `trials`.
pub fn wilson95(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054f64;
    let t = trials as f64;
    let p = errors as f64 / t;
    let z2 = z * z;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = z * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// The fixed code (codebook and relay matrices) an experiment runs with,
/// drawn once from the master seed.
pub struct CodeInstance {
    pub codebook: Codebook,
    pub relays: RelayCodeAssignment,
    pub context: DecoderContext,
    pub precision: Precision,
}

pub fn build_code(topology: &Topology, cfg: &SimulationConfig) -> Result<CodeInstance> {
    let n = match cfg.precision {
        Some(n) => n,
        None => compute_precision(topology)?,
    };
    let mut cb_rng = derive(cfg.seed, Domain::Codebook, 0);
    let codebook = generate_codebook(
        cfg.message_bits,
        cfg.num_symbols,
        n,
        &mut cb_rng,
        DEFAULT_CODEBOOK_CAP_BITS,
    )?;
    let relays = RelayCodeAssignment::generate(topology, n, cfg.num_symbols, cfg.seed);
    let context = DecoderContext::build(topology, n, cfg.tail_tol, cfg.seed);
    Ok(CodeInstance {
        codebook,
        relays,
        context,
        precision: n,
    })
}

fn run_one_trial(
    topology: &Topology,
    destination: usize,
    cfg: &SimulationConfig,
    code: &CodeInstance,
    trial: u64,
) -> Result<bool> {
    let truth = derive(cfg.seed, Domain::TrialMessage, trial).next_u64()
        & (code.codebook.message_count() - 1);
    let mut noise = GaussianNoise::new(derive(cfg.seed, Domain::TrialNoise, trial));
    let received = simulate_network_block(
        topology,
        code.codebook.codeword(truth),
        code.relays.matrices(),
        code.precision,
        cfg.num_symbols,
        &mut noise,
    )?;
    let reception = &received[&destination];
    let decoded = match cfg.decoder {
        DecoderKind::MlExact => Some(decode_ml_exact(
            reception,
            destination,
            &code.codebook,
            topology,
            &code.relays,
            cfg.tail_tol,
            cfg.ml_state_cap_bits,
        )?),
        DecoderKind::Typicality => {
            let assoc_seed = derive(cfg.seed, Domain::Association, trial).next_u64();
            decode_typicality(
                reception,
                destination,
                &code.codebook,
                topology,
                &code.relays,
                TypicalityParams {
                    epsilon: cfg.epsilon,
                    assoc_samples: cfg.assoc_samples,
                },
                &code.context,
                assoc_seed,
            )?
            .decoded()
        }
    };
    Ok(decoded != Some(truth))
}

/// Run the experiment and aggregate the block error rate.
pub fn run_simulation(
    topology: &Topology,
    destination: usize,
    cfg: &SimulationConfig,
) -> Result<SimulationResult> {
    if cfg.trials == 0 {
        return Err(Error::Config("at least one trial required".into()));
    }
    let code = build_code(topology, cfg)?;
    let body = || -> Result<u64> {
        let flags: Vec<Result<bool>> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| run_one_trial(topology, destination, cfg, &code, trial))
            .collect();
        let mut errors = 0;
        for f in flags {
            if f? {
                errors += 1;
            }
        }
        Ok(errors)
    };
    let errors = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(body)?,
        None => body()?,
    };
    let bler = errors as f64 / cfg.trials as f64;
    let (lo, hi) = wilson95(errors, cfg.trials);
    Ok(SimulationResult {
        num_symbols: cfg.num_symbols,
        message_bits: cfg.message_bits,
        decoder: cfg.decoder,
        trials: cfg.trials,
        errors,
        bler,
        wilson95_lo: lo,
        wilson95_hi: hi,
    })
}
