//! Command-line front end: topology ingestion, cut-set bound reports, the
//! transition-law oracle, and seeded block-error-rate experiments, all as CSV.
//!
//! Exit codes: 0 on success, 1 on runtime errors, 2 on configuration errors
//! (unparsable files, invalid topologies, bad flag combinations).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qlnc::cutset::{
    cutset_bound, gap_sweep, multicast_bound, sweep_to_csv, CutsetConfig, DiscreteStrategy,
    MiMode,
};
use qlnc::discrete::BitTuple;
use qlnc::experiment::{run_simulation, DecoderKind, SimulationConfig};
use qlnc::topology::{compute_precision, Topology};

#[derive(Parser)]
#[command(
    name = "qlnc",
    version,
    about = "Quantized linear network coding toolkit for layered relay networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Gaussian,
    Discrete,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    MlExact,
    Typicality,
}

#[derive(Subcommand)]
enum Command {
    /// Print the discrete interface precision of a topology
    Precision {
        /// Topology file (TOML)
        #[arg(long)]
        config: PathBuf,
        /// Output path; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate per-cut mutual informations and cut-set bounds as CSV
    Cutset {
        #[arg(long)]
        config: PathBuf,
        /// Which per-cut quantities to evaluate
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
        /// Destination node; defaults to the sole declared destination
        #[arg(long)]
        destination: Option<usize>,
        /// Gain-scaling sweep over exponents, e.g. `0..6`
        #[arg(long)]
        sweep: Option<String>,
        /// Monte Carlo samples per estimated term
        #[arg(long, default_value_t = 20_000)]
        mc_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a receiver's exact per-symbol transition law as CSV
    Transition {
        #[arg(long)]
        config: PathBuf,
        /// Receiving node
        #[arg(long)]
        receiver: usize,
        /// Parent tuples as semicolon-separated bit strings, in parent-id
        /// order; all-zero tuples when absent
        #[arg(long)]
        tuples: Option<String>,
        #[arg(long, default_value_t = 1e-12)]
        tail_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded block-error-rate experiment
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Block length in symbols
        #[arg(long = "block-len")]
        block_len: usize,
        /// Message bits per block
        #[arg(long = "msg-bits")]
        msg_bits: u32,
        #[arg(long)]
        trials: u64,
        #[arg(long, value_enum, default_value = "ml-exact")]
        decoder: DecoderArg,
        /// Typicality margin in bits
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        /// Association samples per message
        #[arg(long = "assoc-samples", default_value_t = 64)]
        assoc_samples: usize,
        /// Master seed (all randomness derives from it)
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        destination: Option<usize>,
        /// Worker thread count; the default pool when absent
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl From<qlnc::Error> for CliError {
    fn from(e: qlnc::Error) -> Self {
        use qlnc::Error::*;
        match e {
            Parse(_) | InvalidTopology(_) | Config(_) | TailTolOutOfRange(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn load_topology(path: &PathBuf) -> Result<Topology, CliError> {
    let topology = Topology::from_file(path)?;
    let violations = topology.validate();
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| format!("  - {v}")).collect();
        return Err(CliError::Config(format!(
            "invalid topology {}:\n{}",
            path.display(),
            lines.join("\n")
        )));
    }
    Ok(topology)
}

fn resolve_destination(topology: &Topology, flag: Option<usize>) -> Result<usize, CliError> {
    match flag {
        Some(d) => {
            if topology.destinations().contains(&d) {
                Ok(d)
            } else {
                Err(CliError::Config(format!("{d} is not a declared destination")))
            }
        }
        None => topology.single_destination().ok_or_else(|| {
            CliError::Config(
                "topology declares several destinations; pass --destination".into(),
            )
        }),
    }
}

fn emit(out: Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_sweep(spec: &str) -> Result<Vec<i32>, CliError> {
    let (lo, hi) = spec
        .split_once("..")
        .ok_or_else(|| CliError::Config(format!("bad sweep range `{spec}`, expected K0..K1")))?;
    let lo: i32 = lo
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("bad sweep start `{lo}`")))?;
    let hi: i32 = hi
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("bad sweep end `{hi}`")))?;
    if hi < lo {
        return Err(CliError::Config(format!("empty sweep range `{spec}`")));
    }
    Ok((lo..=hi).collect())
}

fn cmd_cutset(
    config: PathBuf,
    mode: ModeArg,
    destination: Option<usize>,
    sweep: Option<String>,
    mc_samples: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let topology = load_topology(&config)?;
    let mode = match mode {
        ModeArg::Gaussian => MiMode::Gaussian,
        ModeArg::Discrete => MiMode::Discrete,
        ModeArg::Both => MiMode::Both,
    };
    let cfg = CutsetConfig {
        mc_samples,
        seed,
        ..Default::default()
    };
    if let Some(spec) = sweep {
        let destination = resolve_destination(&topology, destination)?;
        let exponents = parse_sweep(&spec)?;
        let rows = gap_sweep(&topology, destination, &exponents, &cfg)?;
        return emit(out, &sweep_to_csv(&rows));
    }
    if destination.is_none() && topology.destinations().len() > 1 {
        // multicast: all destinations, one block per destination plus the
        // multicast minimum
        let report = multicast_bound(&topology, mode, DiscreteStrategy::Auto, &cfg)?;
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.9}")).unwrap_or_default();
        let mut text =
            String::from("destination,cut_bitmask,gaussian_bits,discrete_bits,discrete_ci\n");
        for per_dest in &report.per_destination {
            for row in &per_dest.rows {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    per_dest.destination,
                    row.cut.omega,
                    fmt(row.gaussian_bits),
                    fmt(row.discrete.map(|e| e.bits)),
                    fmt(row.discrete.map(|e| e.width95)),
                ));
            }
        }
        text.push_str(&format!(
            "multicast,min,{},{},\n",
            fmt(report.gaussian_bits()),
            fmt(report.discrete_bits()),
        ));
        return emit(out, &text);
    }
    let destination = resolve_destination(&topology, destination)?;
    let report = cutset_bound(&topology, mode, DiscreteStrategy::Auto, destination, &cfg)?;
    emit(out, &report.to_csv())
}

fn cmd_transition(
    config: PathBuf,
    receiver: usize,
    tuples: Option<String>,
    tail_tol: f64,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let topology = load_topology(&config)?;
    if receiver >= topology.node_count() {
        return Err(CliError::Config(format!("receiver {receiver} out of range")));
    }
    let n = compute_precision(&topology)?;
    let parents = topology.parents(receiver);
    let gains: Vec<_> = parents.iter().map(|&(_, g)| g).collect();
    let parent_tuples: Vec<BitTuple> = match tuples {
        None => vec![BitTuple::zero(n); parents.len()],
        Some(spec) => {
            let parts: Vec<&str> = spec.split(';').map(str::trim).collect();
            if parts.len() != parents.len() {
                return Err(CliError::Config(format!(
                    "{} tuples given for {} parents",
                    parts.len(),
                    parents.len()
                )));
            }
            parts
                .iter()
                .map(|p| {
                    let bits: Vec<u8> = p
                        .bytes()
                        .map(|b| match b {
                            b'0' => Ok(0),
                            b'1' => Ok(1),
                            _ => Err(CliError::Config(format!("bad tuple bit string `{p}`"))),
                        })
                        .collect::<Result<_, _>>()?;
                    BitTuple::from_bits(&bits, n).map_err(CliError::from)
                })
                .collect::<Result<_, _>>()?
        }
    };
    let law = qlnc::channel::transition_probabilities(&gains, &parent_tuples, n, tail_tol)?;
    let mut text = String::from("tuple_bits,probability\n");
    for (idx, p) in law.iter().enumerate() {
        let tuple = BitTuple::from_index(idx as u64, n);
        let bits: String = tuple
            .bits_vec()
            .into_iter()
            .map(|b| if b == 1 { '1' } else { '0' })
            .collect();
        text.push_str(&format!("{bits},{p:.12e}\n"));
    }
    emit(out, &text)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    config: PathBuf,
    block_len: usize,
    msg_bits: u32,
    trials: u64,
    decoder: DecoderArg,
    epsilon: f64,
    assoc_samples: usize,
    seed: u64,
    destination: Option<usize>,
    threads: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    if block_len == 0 || trials == 0 {
        return Err(CliError::Config("block length and trials must be positive".into()));
    }
    let topology = load_topology(&config)?;
    let destination = resolve_destination(&topology, destination)?;
    let mut cfg = SimulationConfig::new(block_len, msg_bits, trials, seed);
    cfg.decoder = match decoder {
        DecoderArg::MlExact => DecoderKind::MlExact,
        DecoderArg::Typicality => DecoderKind::Typicality,
    };
    cfg.epsilon = epsilon;
    cfg.assoc_samples = assoc_samples;
    cfg.threads = threads;
    let result = run_simulation(&topology, destination, &cfg)?;
    emit(out, &result.to_csv())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Precision { config, out } => {
            let topology = load_topology(&config)?;
            let n = compute_precision(&topology)?;
            emit(out, &format!("{}\n", n.get()))
        }
        Command::Cutset {
            config,
            mode,
            destination,
            sweep,
            mc_samples,
            seed,
            out,
        } => cmd_cutset(config, mode, destination, sweep, mc_samples, seed, out),
        Command::Transition {
            config,
            receiver,
            tuples,
            tail_tol,
            out,
        } => cmd_transition(config, receiver, tuples, tail_tol, out),
        Command::Simulate {
            config,
            block_len,
            msg_bits,
            trials,
            decoder,
            epsilon,
            assoc_samples,
            seed,
            destination,
            threads,
            out,
        } => cmd_simulate(
            config,
            block_len,
            msg_bits,
            trials,
            decoder,
            epsilon,
            assoc_samples,
            seed,
            destination,
            threads,
            out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
