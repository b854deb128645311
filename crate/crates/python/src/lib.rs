//! Python bindings, importable as `pystreamhp`.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use streamhp::ingest::{column_net, read_matrix_path, stream_order, synthetic_pattern, StreamFile, SyntheticSpec};
use streamhp::metrics::evaluate;
use streamhp::partitioners::{run, Algorithm, PartitionerConfig, RunOptions};
use streamhp::refine::{run_refined, BufferCapacity, RefineConfig, RefineStrategy};
use streamhp::sketch::MERSENNE_31;
use streamhp::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Balance slack after `assigned` vertices over `parts` parts.
#[pyfunction]
#[pyo3(signature = (assigned, parts, beta = 0.1))]
fn dynamic_slack(assigned: u64, parts: u32, beta: f64) -> u64 {
    streamhp::dynamic_slack(assigned, parts, beta)
}

/// Predicted false-positive rate of a filter with `bits` bits, `hashes`
/// hash functions and `inserted` keys.
#[pyfunction]
fn bf_fpp(hashes: u32, inserted: u64, bits: u64) -> f64 {
    streamhp::sketch::bf_fpp(hashes, inserted, bits)
}

#[pyclass(module = "pystreamhp", frozen)]
struct Hypergraph {
    inner: streamhp::Hypergraph,
}

#[pymethods]
impl Hypergraph {
    /// `vertex_nets[v]` lists the nets of vertex `v`.
    #[new]
    fn new(num_nets: usize, vertex_nets: Vec<Vec<u32>>) -> PyResult<Self> {
        let inner = streamhp::Hypergraph::from_vertex_nets(num_nets, vertex_nets).map_err(py_err)?;
        Ok(Hypergraph { inner })
    }

    /// Column-net hypergraph of a Matrix Market file: rows are vertices.
    #[staticmethod]
    fn from_matrix_market(path: &str) -> PyResult<Self> {
        let m = read_matrix_path(path).map_err(py_err)?;
        Ok(Hypergraph { inner: column_net(&m) })
    }

    #[staticmethod]
    #[pyo3(signature = (vertices = 10_000, nets = 10_000, mean_degree = 10.0, clusters = 64, locality = 0.8, exponent = 2.5, seed = 0))]
    fn synthetic(
        vertices: usize,
        nets: usize,
        mean_degree: f64,
        clusters: usize,
        locality: f64,
        exponent: f64,
        seed: u64,
    ) -> PyResult<Self> {
        let spec = SyntheticSpec {
            vertices,
            nets,
            mean_degree,
            clusters,
            locality,
            exponent,
            seed,
        };
        let m = synthetic_pattern(&spec).map_err(py_err)?;
        Ok(Hypergraph { inner: column_net(&m) })
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_nets(&self) -> usize {
        self.inner.num_nets()
    }

    #[getter]
    fn num_pins(&self) -> usize {
        self.inner.num_pins()
    }

    fn nets(&self, v: u32) -> PyResult<Vec<u32>> {
        if v as usize >= self.inner.num_vertices() {
            return Err(PyValueError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.nets(v).to_vec())
    }

    fn pins(&self, n: u32) -> PyResult<Vec<u32>> {
        if n as usize >= self.inner.num_nets() {
            return Err(PyValueError::new_err(format!("net {n} out of range")));
        }
        Ok(self.inner.pins(n).to_vec())
    }

    /// Random vertex order, reproducible from `seed`.
    #[pyo3(signature = (seed = 0))]
    fn stream(&self, seed: u64) -> Stream {
        Stream {
            inner: stream_order(&self.inner, seed),
        }
    }

    fn cutsize(&self, parts: Vec<u32>) -> PyResult<u64> {
        streamhp::connectivity_cutsize(&self.inner, &parts).map_err(py_err)
    }

    /// Cut, connectivity histogram, imbalance, part weights and boundary count.
    fn evaluate<'py>(&self, py: Python<'py>, parts: Vec<u32>, k: u32) -> PyResult<Bound<'py, PyAny>> {
        let ev = evaluate(&self.inner, &parts, k).map_err(py_err)?;
        to_py(py, &ev)
    }

    fn __repr__(&self) -> String {
        format!(
            "Hypergraph(vertices={}, nets={}, pins={})",
            self.inner.num_vertices(),
            self.inner.num_nets(),
            self.inner.num_pins()
        )
    }
}

#[pyclass(module = "pystreamhp", frozen)]
struct Stream {
    inner: StreamFile,
}

#[pymethods]
impl Stream {
    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        Ok(Stream {
            inner: StreamFile::read_path(path).map_err(py_err)?,
        })
    }

    fn write(&self, path: &str) -> PyResult<()> {
        self.inner.write_path(path).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn vertices(&self) -> u64 {
        self.inner.header.vertices
    }

    #[getter]
    fn nets(&self) -> u64 {
        self.inner.header.nets
    }

    #[getter]
    fn pins(&self) -> u64 {
        self.inner.header.pins
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.header.seed
    }

    /// `(vertex, nets)` pairs in stream order.
    fn elements(&self) -> Vec<(u32, Vec<u32>)> {
        self.inner
            .elements
            .iter()
            .map(|e| (e.vertex, e.nets.clone()))
            .collect()
    }

    fn hypergraph(&self) -> PyResult<Hypergraph> {
        Ok(Hypergraph {
            inner: self.inner.hypergraph().map_err(py_err)?,
        })
    }
}

#[pyclass(module = "pystreamhp")]
struct BloomFilter {
    inner: streamhp::sketch::BloomFilter,
}

#[pymethods]
impl BloomFilter {
    #[new]
    #[pyo3(signature = (bits, hashes = 4))]
    fn new(bits: u64, hashes: u32) -> PyResult<Self> {
        Ok(BloomFilter {
            inner: streamhp::sketch::BloomFilter::new(bits, hashes).map_err(py_err)?,
        })
    }

    fn insert(&mut self, key: u64) {
        self.inner.insert(key);
    }

    fn query(&self, key: u64) -> bool {
        self.inner.query(key)
    }

    fn __contains__(&self, key: u64) -> bool {
        self.inner.query(key)
    }

    #[getter]
    fn inserted(&self) -> u64 {
        self.inner.inserted()
    }

    #[getter]
    fn bits(&self) -> u64 {
        self.inner.bits()
    }

    /// Predicted false-positive rate at the current load.
    fn fpp(&self) -> f64 {
        self.inner.fpp()
    }
}

#[pyclass(module = "pystreamhp", frozen)]
struct MinHashFamily {
    inner: streamhp::sketch::MinHashFamily,
}

#[pymethods]
impl MinHashFamily {
    #[new]
    #[pyo3(signature = (hashes = 4, seed = 0, modulus = MERSENNE_31))]
    fn new(hashes: usize, seed: u64, modulus: u64) -> PyResult<Self> {
        Ok(MinHashFamily {
            inner: streamhp::sketch::MinHashFamily::new(hashes, modulus, seed).map_err(py_err)?,
        })
    }

    fn signature(&self, nets: Vec<u32>) -> Option<Vec<u64>> {
        self.inner.signature(&nets)
    }

    fn part(&self, nets: Vec<u32>, parts: u32) -> Option<u32> {
        self.inner.part(&nets, parts)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Partitions a stream; returns `(part_vector, stats)`.
#[pyfunction]
#[pyo3(signature = (
    stream, parts, algorithm = "minmax-n2p", beta = 0.1, seed = 0, ell = None, bf_bits = None,
    bf_hashes = None, mh_hashes = None, refine = None, passes = None, buffer_frac = None,
    buffer_pins = None, sv_threshold = None, checkpoints = 0, audit = false
))]
#[allow(clippy::too_many_arguments)]
fn partition<'py>(
    py: Python<'py>,
    stream: &Stream,
    parts: u32,
    algorithm: &str,
    beta: f64,
    seed: u64,
    ell: Option<usize>,
    bf_bits: Option<u64>,
    bf_hashes: Option<u32>,
    mh_hashes: Option<usize>,
    refine: Option<&str>,
    passes: Option<u32>,
    buffer_frac: Option<f64>,
    buffer_pins: Option<u64>,
    sv_threshold: Option<u32>,
    checkpoints: usize,
    audit: bool,
) -> PyResult<(Vec<u32>, Bound<'py, PyAny>)> {
    let alg: Algorithm = algorithm.parse().map_err(py_err)?;
    let mut cfg = PartitionerConfig::new(alg, parts);
    cfg.beta = beta;
    cfg.seed = seed;
    cfg.ell = ell.unwrap_or(cfg.ell);
    cfg.bf_bits = bf_bits.unwrap_or(cfg.bf_bits);
    cfg.bf_hashes = bf_hashes.unwrap_or(cfg.bf_hashes);
    cfg.mh_hashes = mh_hashes.unwrap_or(cfg.mh_hashes);
    let options = RunOptions { checkpoints, audit };

    let Some(strategy) = refine else {
        if passes.is_some() || buffer_frac.is_some() || buffer_pins.is_some() || sv_threshold.is_some() {
            return Err(PyValueError::new_err("buffer options need `refine`"));
        }
        let out = py.detach(|| run(&cfg, &stream.inner, &options)).map_err(py_err)?;
        return Ok((out.parts, to_py(py, &out.stats)?));
    };
    let strategy: RefineStrategy = strategy.parse().map_err(py_err)?;
    let mut rc = RefineConfig::new(strategy);
    rc.passes = passes.unwrap_or(rc.passes);
    rc.capacity = match (buffer_frac, buffer_pins) {
        (Some(_), Some(_)) => return Err(PyValueError::new_err("give buffer_frac or buffer_pins, not both")),
        (Some(f), None) => BufferCapacity::Fraction(f),
        (None, Some(p)) => BufferCapacity::Pins(p),
        (None, None) => rc.capacity,
    };
    rc.threshold = sv_threshold;
    let out = py
        .detach(|| run_refined(&cfg, &rc, &stream.inner, &options, None))
        .map_err(py_err)?;
    let stats = to_py(py, &out.stats)?;
    stats.set_item("flushes", to_py(py, &out.trace)?)?;
    Ok((out.parts, stats))
}

#[pymodule]
fn pystreamhp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(dynamic_slack, m)?)?;
    m.add_function(wrap_pyfunction!(bf_fpp, m)?)?;
    m.add_function(wrap_pyfunction!(partition, m)?)?;
    m.add_class::<Hypergraph>()?;
    m.add_class::<Stream>()?;
    m.add_class::<BloomFilter>()?;
    m.add_class::<MinHashFamily>()?;
    m.add("ALGORITHMS", Algorithm::ALL.iter().map(|a| a.name()).collect::<Vec<_>>())?;
    Ok(())
}
