use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;
use streamhp::ingest::{
    column_net, read_matrix_path, stream_order, synthetic_pattern, StreamFile, SyntheticSpec, MAGIC,
};
use streamhp::metrics::evaluate as evaluate_parts;
use streamhp::partitioners::{run, Algorithm, PartitionerConfig, RunOptions, RunStats};
use streamhp::refine::{run_refined, BufferCapacity, FlushRecord, RefineConfig, RefineStrategy};
use streamhp::{Hypergraph, PartId};

use crate::args::{AlgArg, ConvertArgs, EvaluateArgs, GenerateArgs, PartitionArgs, RefineArg};
use crate::{CliError, CliResult};

/// Everything that selects and tunes one partitioning run. Unset options
/// take the library defaults; options that do not apply to the chosen
/// algorithm are rejected.
#[derive(Debug, Clone, Default)]
pub struct JobParams {
    pub algorithm: Option<Algorithm>,
    pub parts: u32,
    pub beta: Option<f64>,
    pub ell: Option<usize>,
    pub bf_bits: Option<u64>,
    pub bf_hashes: Option<u32>,
    pub mh_hashes: Option<usize>,
    pub refine: Option<RefineStrategy>,
    pub passes: Option<u32>,
    pub buffer_frac: Option<f64>,
    pub buffer_pins: Option<u64>,
    pub sv_threshold: Option<u32>,
}

fn reject(flag: &str, reason: &str) -> CliError {
    CliError::Usage(format!("{flag} {reason}"))
}

impl JobParams {
    pub fn configs(&self, seed: u64) -> CliResult<(PartitionerConfig, Option<RefineConfig>)> {
        let alg = self.algorithm.unwrap_or(Algorithm::MinMaxN2p);
        let only = |set: bool, flag: &str, want: Algorithm| {
            if set && alg != want {
                Err(reject(flag, &format!("only applies to {want}, not {alg}")))
            } else {
                Ok(())
            }
        };
        only(self.ell.is_some(), "ell", Algorithm::MinMaxL)?;
        only(self.bf_bits.is_some(), "bf-bits", Algorithm::MinMaxBf)?;
        only(self.bf_hashes.is_some(), "bf-hashes", Algorithm::MinMaxBf)?;
        only(self.mh_hashes.is_some(), "mh-hashes", Algorithm::MinMaxMh)?;
        only(self.refine.is_some(), "refine", Algorithm::MinMaxN2p)?;
        if self.refine.is_none() {
            for (set, flag) in [
                (self.passes.is_some(), "passes"),
                (self.buffer_frac.is_some(), "buffer-frac"),
                (self.buffer_pins.is_some(), "buffer-pins"),
                (self.sv_threshold.is_some(), "sv-threshold"),
            ] {
                if set {
                    return Err(reject(flag, "needs refinement to be enabled"));
                }
            }
        }
        if self.sv_threshold.is_some() && self.refine != Some(RefineStrategy::RefRlxSv) {
            return Err(reject("sv-threshold", "only applies to ref-rlx-sv"));
        }
        if self.buffer_frac.is_some() && self.buffer_pins.is_some() {
            return Err(reject("buffer-frac", "conflicts with buffer-pins"));
        }

        let mut cfg = PartitionerConfig::new(alg, self.parts);
        cfg.seed = seed;
        if let Some(b) = self.beta {
            cfg.beta = b;
        }
        if let Some(l) = self.ell {
            cfg.ell = l;
        }
        if let Some(m) = self.bf_bits {
            cfg.bf_bits = m;
        }
        if let Some(h) = self.bf_hashes {
            cfg.bf_hashes = h;
        }
        if let Some(h) = self.mh_hashes {
            cfg.mh_hashes = h;
        }
        cfg.validate()?;

        let refine = match self.refine {
            None => None,
            Some(strategy) => {
                let mut r = RefineConfig::new(strategy);
                if let Some(p) = self.passes {
                    r.passes = p;
                }
                if let Some(f) = self.buffer_frac {
                    r.capacity = BufferCapacity::Fraction(f);
                }
                if let Some(b) = self.buffer_pins {
                    r.capacity = BufferCapacity::Pins(b);
                }
                r.threshold = self.sv_threshold;
                r.validate()?;
                Some(r)
            }
        };
        Ok((cfg, refine))
    }
}

pub struct JobResult {
    pub parts: Vec<PartId>,
    pub stats: RunStats,
    pub trace: Option<Vec<FlushRecord>>,
}

pub fn execute(
    cfg: &PartitionerConfig,
    refine: Option<&RefineConfig>,
    stream: &StreamFile,
    options: &RunOptions,
) -> CliResult<JobResult> {
    Ok(match refine {
        None => {
            let out = run(cfg, stream, options)?;
            JobResult {
                parts: out.parts,
                stats: out.stats,
                trace: None,
            }
        }
        Some(r) => {
            let out = run_refined(cfg, r, stream, options, None)?;
            JobResult {
                parts: out.parts,
                stats: out.stats,
                trace: Some(out.trace),
            }
        }
    })
}

/// Whether the run keeps exact net-to-part lists, so that
/// `entries = cut + nets seen` must hold.
pub fn keeps_exact_lists(cfg: &PartitionerConfig) -> bool {
    matches!(cfg.algorithm, Algorithm::MinMax | Algorithm::MinMaxN2p)
}

impl From<AlgArg> for Algorithm {
    fn from(a: AlgArg) -> Self {
        match a {
            AlgArg::Random => Algorithm::Random,
            AlgArg::Minmax => Algorithm::MinMax,
            AlgArg::MinmaxN2p => Algorithm::MinMaxN2p,
            AlgArg::MinmaxL => Algorithm::MinMaxL,
            AlgArg::MinmaxBf => Algorithm::MinMaxBf,
            AlgArg::MinmaxMh => Algorithm::MinMaxMh,
        }
    }
}

fn with_path<T>(path: &Path, r: streamhp::Result<T>) -> CliResult<T> {
    r.map_err(|e| match CliError::from(e) {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Invariant(e.to_string()))?;
    match path {
        Some(p) => {
            let mut w = create(p)?;
            writeln!(w, "{text}")?;
            w.flush()?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

pub fn read_stream(path: &Path) -> CliResult<StreamFile> {
    with_path(path, StreamFile::read_path(path))
}

/// Loads a stream file, or a Matrix Market file as its column-net
/// hypergraph, telling them apart by the stream magic bytes.
pub fn load_hypergraph(path: &Path) -> CliResult<Hypergraph> {
    let mut head = [0u8; 8];
    let n = File::open(path)
        .and_then(|mut f| f.read(&mut head))
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if n == head.len() && head == MAGIC {
        with_path(path, read_stream(path)?.hypergraph())
    } else {
        Ok(column_net(&with_path(path, read_matrix_path(path))?))
    }
}

pub fn write_parts(parts: &[PartId], path: &Path) -> CliResult {
    let mut w = create(path)?;
    for p in parts {
        writeln!(w, "{p}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_parts(path: &Path) -> CliResult<Vec<PartId>> {
    let f = File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut parts = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        parts.push(
            t.parse()
                .map_err(|_| CliError::Input(format!("{}:{}: bad part id `{t}`", path.display(), i + 1)))?,
        );
    }
    Ok(parts)
}

pub fn convert(a: &ConvertArgs) -> CliResult {
    let m = with_path(&a.matrix, read_matrix_path(&a.matrix))?;
    let hg = column_net(&m);
    let stream = stream_order(&hg, a.seed);
    let mut w = create(&a.out)?;
    stream.write_to(&mut w)?;
    w.flush()?;
    log::info!(
        "{} vertices, {} nets, {} pins -> {}",
        hg.num_vertices(),
        hg.num_nets(),
        hg.num_pins(),
        a.out.display()
    );
    Ok(())
}

pub fn generate(a: &GenerateArgs) -> CliResult {
    let spec = SyntheticSpec {
        vertices: a.vertices,
        nets: a.nets,
        mean_degree: a.mean_degree,
        clusters: a.clusters,
        locality: a.locality,
        exponent: a.exponent,
        seed: a.seed,
    };
    let m = synthetic_pattern(&spec)?;
    let mut w = create(&a.out)?;
    m.write_matrix_market(&mut w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PartitionReport<'a> {
    config: &'a PartitionerConfig,
    refine: Option<&'a RefineConfig>,
    stats: &'a RunStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    flushes: Option<&'a [FlushRecord]>,
    verified: bool,
}

impl From<&PartitionArgs> for JobParams {
    fn from(a: &PartitionArgs) -> Self {
        JobParams {
            algorithm: Some(a.alg.into()),
            parts: a.parts,
            beta: Some(a.beta),
            ell: a.ell,
            bf_bits: a.bf_bits,
            bf_hashes: a.bf_hashes,
            mh_hashes: a.mh_hashes,
            refine: match a.refine {
                RefineArg::Off => None,
                RefineArg::Ref => Some(RefineStrategy::Ref),
                RefineArg::RefRlx => Some(RefineStrategy::RefRlx),
                RefineArg::RefRlxSv => Some(RefineStrategy::RefRlxSv),
            },
            passes: a.passes,
            buffer_frac: a.buffer_frac,
            buffer_pins: a.buffer_pins,
            sv_threshold: a.sv_threshold,
        }
    }
}

/// Recomputes cut and imbalance from scratch and checks the entry identity.
fn verify(cfg: &PartitionerConfig, refined: bool, stream: &StreamFile, job: &JobResult) -> CliResult {
    let hg = with_path(Path::new("<stream>"), stream.hypergraph())?;
    let ev = evaluate_parts(&hg, &job.parts, cfg.parts)?;
    let s = &job.stats;
    let mismatch = |what: &str, reported: u64, derived: u64| {
        CliError::Invariant(format!("{what}: reported {reported}, recomputed {derived}"))
    };
    if ev.cut != s.cut {
        return Err(mismatch("cut", s.cut, ev.cut));
    }
    if ev.imbalance != s.imbalance {
        return Err(mismatch("imbalance", s.imbalance, ev.imbalance));
    }
    if (refined || keeps_exact_lists(cfg)) && s.entries != ev.cut + s.nets_seen {
        return Err(mismatch("entries", s.entries, ev.cut + s.nets_seen));
    }
    Ok(())
}

pub fn partition(a: &PartitionArgs) -> CliResult {
    let (cfg, refine) = JobParams::from(a).configs(a.seed)?;
    if refine.is_none() && a.trace.is_some() {
        return Err(reject("trace", "needs refinement to be enabled"));
    }
    let stream = read_stream(&a.stream)?;
    let options = RunOptions {
        checkpoints: a.checkpoints,
        audit: a.verify,
    };
    let job = execute(&cfg, refine.as_ref(), &stream, &options)?;
    if a.verify {
        verify(&cfg, refine.is_some(), &stream, &job)?;
    }
    if let Some(p) = &a.out {
        write_parts(&job.parts, p)?;
    }
    if let (Some(p), Some(trace)) = (&a.trace, &job.trace) {
        let mut w = create(p)?;
        for rec in trace {
            serde_json::to_writer(&mut w, rec).map_err(|e| CliError::Invariant(e.to_string()))?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
    }
    let report = PartitionReport {
        config: &cfg,
        refine: refine.as_ref(),
        stats: &job.stats,
        flushes: job.trace.as_deref(),
        verified: a.verify,
    };
    write_json(&report, a.stats.as_deref())
}

pub fn evaluate(a: &EvaluateArgs) -> CliResult {
    let hg = load_hypergraph(&a.input)?;
    let parts = read_parts(&a.part_vector)?;
    let ev = evaluate_parts(&hg, &parts, a.parts)?;
    write_json(&ev, a.out.as_deref())
}

/// Reads a whole file, mapping failures to input errors.
pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

