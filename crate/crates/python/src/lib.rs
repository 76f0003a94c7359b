//! Python bindings: the topology type plus the main analysis and simulation
//! entry points, mirroring the CLI surface.
//!
//! Build with `cargo build -p qlnc-py`, then import the produced cdylib as
//! `qlnc_py` (see `python/smoke_test.py` for a loader).

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qlnc::channel::transition_probabilities;
use qlnc::cutset::{
    cutset_bound, gap_sweep, multicast_bound, CutsetConfig, DiscreteStrategy, MiMode,
};
use qlnc::discrete::BitTuple;
use qlnc::experiment::{run_simulation, DecoderKind, SimulationConfig};
use qlnc::topology::{compute_precision, Precision};

fn to_py_err(e: qlnc::Error) -> PyErr {
    use qlnc::Error::*;
    match e {
        Parse(_) | InvalidTopology(_) | Config(_) | TailTolOutOfRange(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<MiMode> {
    match mode {
        "gaussian" => Ok(MiMode::Gaussian),
        "discrete" => Ok(MiMode::Discrete),
        "both" => Ok(MiMode::Both),
        _ => Err(PyValueError::new_err(format!(
            "unknown mode `{mode}` (expected gaussian, discrete or both)"
        ))),
    }
}

/// A layered relay-network topology.
#[pyclass(name = "Topology", from_py_object)]
#[derive(Clone)]
struct PyTopology {
    inner: qlnc::topology::Topology,
}

#[pymethods]
impl PyTopology {
    /// Load a topology from a TOML file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let inner = qlnc::topology::Topology::from_file(path).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// Parse a topology from TOML text.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let inner = qlnc::topology::Topology::from_toml_str(text).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn layer_of(&self, node: usize) -> PyResult<u32> {
        if node >= self.inner.node_count() {
            return Err(PyValueError::new_err(format!("node {node} out of range")));
        }
        Ok(self.inner.layer_of(node))
    }

    fn destinations(&self) -> Vec<usize> {
        self.inner.destinations().iter().copied().collect()
    }

    /// Structural violations; an empty list means the topology is valid.
    fn validate(&self) -> Vec<String> {
        self.inner.validate().iter().map(|v| v.to_string()).collect()
    }

    /// The discrete interface precision derived from the gains.
    fn precision(&self) -> PyResult<u32> {
        Ok(compute_precision(&self.inner).map_err(to_py_err)?.get())
    }

    fn __repr__(&self) -> String {
        format!(
            "Topology(nodes={}, layers={}, destinations={:?})",
            self.inner.node_count(),
            self.inner.layer_count(),
            self.destinations()
        )
    }
}

/// Map a bit tuple (real bits then imaginary bits, fractional weights
/// 2^-1, 2^-2, ...) to its complex transmit symbol.
#[pyfunction]
fn encode_symbol(bits: Vec<u8>) -> PyResult<(f64, f64)> {
    if bits.is_empty() || bits.len() % 2 != 0 || bits.iter().any(|&b| b > 1) {
        return Err(PyValueError::new_err("bits must be a nonempty even-length 0/1 list"));
    }
    let n = Precision::new((bits.len() / 2) as u32);
    let tuple = BitTuple::from_bits(&bits, n).map_err(to_py_err)?;
    let x = qlnc::discrete::encode_symbol(tuple);
    Ok((x.re, x.im))
}

/// Quantize a complex reception to its 2n-bit tuple (a list of 0/1 ints).
#[pyfunction]
fn quantize(re: f64, im: f64, n: u32) -> PyResult<Vec<u32>> {
    if n == 0 || !re.is_finite() || !im.is_finite() {
        return Err(PyValueError::new_err("need finite components and n >= 1"));
    }
    let tuple = qlnc::discrete::quantize(Complex64::new(re, im), Precision::new(n));
    Ok(tuple.bits_vec().into_iter().map(u32::from).collect())
}

/// Per-cut mutual informations and the cut-set bound for one destination.
///
/// Returns a dict with `rows` (list of per-cut dicts) and the achieved
/// `gaussian_min` / `discrete_min`.
#[pyfunction]
#[pyo3(signature = (topology, mode="both", destination=None, mc_samples=20_000, seed=0))]
fn cutset<'py>(
    py: Python<'py>,
    topology: &PyTopology,
    mode: &str,
    destination: Option<usize>,
    mc_samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = parse_mode(mode)?;
    let destination = match destination {
        Some(d) => d,
        None => topology.inner.single_destination().ok_or_else(|| {
            PyValueError::new_err("several destinations; pass destination=...")
        })?,
    };
    let cfg = CutsetConfig { mc_samples, seed, ..Default::default() };
    let report = cutset_bound(&topology.inner, mode, DiscreteStrategy::Auto, destination, &cfg)
        .map_err(to_py_err)?;
    let out = PyDict::new(py);
    let rows = pyo3::types::PyList::empty(py);
    for row in &report.rows {
        let d = PyDict::new(py);
        d.set_item("cut_bitmask", row.cut.omega)?;
        d.set_item("gaussian_bits", row.gaussian_bits)?;
        d.set_item("discrete_bits", row.discrete.map(|e| e.bits))?;
        d.set_item("discrete_ci", row.discrete.map(|e| e.width95))?;
        rows.append(d)?;
    }
    out.set_item("destination", destination)?;
    out.set_item("rows", rows)?;
    out.set_item("gaussian_min", report.gaussian_min().map(|(b, _)| b))?;
    out.set_item("discrete_min", report.discrete_min().map(|(e, _)| e.bits))?;
    Ok(out)
}

/// Multicast bound: minimum of the per-destination bounds.
#[pyfunction]
#[pyo3(signature = (topology, mode="both", mc_samples=20_000, seed=0))]
fn multicast<'py>(
    py: Python<'py>,
    topology: &PyTopology,
    mode: &str,
    mc_samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = parse_mode(mode)?;
    let cfg = CutsetConfig { mc_samples, seed, ..Default::default() };
    let report =
        multicast_bound(&topology.inner, mode, DiscreteStrategy::Auto, &cfg).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("gaussian_bits", report.gaussian_bits())?;
    out.set_item("discrete_bits", report.discrete_bits())?;
    let per_dest = pyo3::types::PyList::empty(py);
    for r in &report.per_destination {
        let d = PyDict::new(py);
        d.set_item("destination", r.destination)?;
        d.set_item("gaussian_min", r.gaussian_min().map(|(b, _)| b))?;
        d.set_item("discrete_min", r.discrete_min().map(|(e, _)| e.bits))?;
        per_dest.append(d)?;
    }
    out.set_item("per_destination", per_dest)?;
    Ok(out)
}

/// Gain-scaling sweep: scale all gains by 2^k for k in `k0..=k1` and report
/// both bounds and their gap per step.
#[pyfunction]
#[pyo3(signature = (topology, k0, k1, destination=None, mc_samples=20_000, seed=0))]
fn sweep<'py>(
    py: Python<'py>,
    topology: &PyTopology,
    k0: i32,
    k1: i32,
    destination: Option<usize>,
    mc_samples: usize,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    if k1 < k0 {
        return Err(PyValueError::new_err("empty sweep range"));
    }
    let destination = match destination {
        Some(d) => d,
        None => topology.inner.single_destination().ok_or_else(|| {
            PyValueError::new_err("several destinations; pass destination=...")
        })?,
    };
    let cfg = CutsetConfig { mc_samples, seed, ..Default::default() };
    let exponents: Vec<i32> = (k0..=k1).collect();
    let rows = gap_sweep(&topology.inner, destination, &exponents, &cfg).map_err(to_py_err)?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("k", r.k)?;
            d.set_item("n", r.n)?;
            d.set_item("cs_g_bits", r.gaussian_bits)?;
            d.set_item("cs_d_bits", r.discrete_bits)?;
            d.set_item("cs_d_ci", r.discrete_width)?;
            d.set_item("gap_bits", r.gap_bits)?;
            Ok(d)
        })
        .collect()
}

/// Seeded block-error-rate experiment.
#[pyfunction]
#[pyo3(signature = (topology, block_len, msg_bits, trials, seed, decoder="ml-exact",
                    epsilon=0.25, assoc_samples=64, destination=None))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    topology: &PyTopology,
    block_len: usize,
    msg_bits: u32,
    trials: u64,
    seed: u64,
    decoder: &str,
    epsilon: f64,
    assoc_samples: usize,
    destination: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let destination = match destination {
        Some(d) => d,
        None => topology.inner.single_destination().ok_or_else(|| {
            PyValueError::new_err("several destinations; pass destination=...")
        })?,
    };
    let mut cfg = SimulationConfig::new(block_len, msg_bits, trials, seed);
    cfg.decoder = match decoder {
        "ml-exact" => DecoderKind::MlExact,
        "typicality" => DecoderKind::Typicality,
        _ => {
            return Err(PyValueError::new_err(format!(
                "unknown decoder `{decoder}` (expected ml-exact or typicality)"
            )))
        }
    };
    cfg.epsilon = epsilon;
    cfg.assoc_samples = assoc_samples;
    let result = run_simulation(&topology.inner, destination, &cfg).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("N", result.num_symbols)?;
    out.set_item("B", result.message_bits)?;
    out.set_item("decoder", result.decoder.label())?;
    out.set_item("trials", result.trials)?;
    out.set_item("errors", result.errors)?;
    out.set_item("bler", result.bler)?;
    out.set_item("wilson95_lo", result.wilson95_lo)?;
    out.set_item("wilson95_hi", result.wilson95_hi)?;
    Ok(out)
}

/// A receiver's exact per-symbol transition law given parent tuples.
#[pyfunction]
#[pyo3(signature = (topology, receiver, tuples=None, tail_tol=1e-12))]
fn transition_law(
    topology: &PyTopology,
    receiver: usize,
    tuples: Option<Vec<Vec<u8>>>,
    tail_tol: f64,
) -> PyResult<Vec<f64>> {
    if receiver >= topology.inner.node_count() {
        return Err(PyValueError::new_err(format!("receiver {receiver} out of range")));
    }
    let n = compute_precision(&topology.inner).map_err(to_py_err)?;
    let parents = topology.inner.parents(receiver);
    let gains: Vec<_> = parents.iter().map(|&(_, g)| g).collect();
    let parent_tuples: Vec<BitTuple> = match tuples {
        None => vec![BitTuple::zero(n); parents.len()],
        Some(lists) => {
            if lists.len() != parents.len() {
                return Err(PyValueError::new_err(format!(
                    "{} tuples given for {} parents",
                    lists.len(),
                    parents.len()
                )));
            }
            lists
                .iter()
                .map(|bits| BitTuple::from_bits(bits, n).map_err(to_py_err))
                .collect::<PyResult<_>>()?
        }
    };
    transition_probabilities(&gains, &parent_tuples, n, tail_tol).map_err(to_py_err)
}

#[pymodule]
fn qlnc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyTopology>()?;
    m.add_function(wrap_pyfunction!(encode_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(quantize, m)?)?;
    m.add_function(wrap_pyfunction!(cutset, m)?)?;
    m.add_function(wrap_pyfunction!(multicast, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(transition_law, m)?)?;
    Ok(())
}
