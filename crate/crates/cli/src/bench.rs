//! Batch runs from a TOML manifest to CSV.
//!
//! ```toml
//! [[run]]
//! stream = "web.shps"        # or: matrix = "web.mtx", streamed once per seed
//! algorithm = "minmax-l"
//! parts = 256
//! seeds = [0, 1, 2]
//! ell = 3
//! ```
//!
//! Paths are relative to the manifest. Rows come out in manifest order,
//! seeds innermost, whatever order the runs finish in.

use std::collections::HashMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use streamhp::ingest::{column_net, read_matrix_path, stream_order, StreamFile};
use streamhp::partitioners::{Algorithm, RunOptions};
use streamhp::refine::RefineStrategy;
use streamhp::Hypergraph;

use crate::args::BenchArgs;
use crate::commands::{execute, read_stream, read_text, JobParams};
use crate::{CliError, CliResult};

pub const HEADER: [&str; 9] = [
    "algorithm",
    "K",
    "seed",
    "cut",
    "imbalance",
    "entries",
    "aux_ints",
    "wall_s",
    "pins_per_s",
];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub run: Vec<RunEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunEntry {
    pub stream: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub algorithm: Algorithm,
    pub parts: u32,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
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

fn default_seeds() -> Vec<u64> {
    vec![0]
}

impl RunEntry {
    fn params(&self) -> JobParams {
        JobParams {
            algorithm: Some(self.algorithm),
            parts: self.parts,
            beta: self.beta,
            ell: self.ell,
            bf_bits: self.bf_bits,
            bf_hashes: self.bf_hashes,
            mh_hashes: self.mh_hashes,
            refine: self.refine,
            passes: self.passes,
            buffer_frac: self.buffer_frac,
            buffer_pins: self.buffer_pins,
            sv_threshold: self.sv_threshold,
        }
    }

    /// `minmax-l5`, `minmax-n2p+ref-rlx`, ...
    fn label(&self) -> String {
        let mut s = self.algorithm.name().to_string();
        if self.algorithm == Algorithm::MinMaxL {
            s.push_str(&self.ell.unwrap_or(5).to_string());
        }
        if let Some(r) = self.refine {
            s.push('+');
            s.push_str(r.name());
        }
        s
    }
}

/// One CSV line. A failed run carries its message in the `cut` column and
/// leaves the numeric columns after it empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub algorithm: String,
    #[serde(rename = "K")]
    pub k: u32,
    pub seed: u64,
    pub cut: String,
    pub imbalance: Option<u64>,
    pub entries: Option<u64>,
    pub aux_ints: Option<u64>,
    pub wall_s: Option<f64>,
    pub pins_per_s: Option<f64>,
}

#[derive(Clone)]
enum Source {
    Stream(Arc<StreamFile>),
    Matrix(Arc<Hypergraph>),
}

fn load_sources(manifest: &Manifest, base: &Path) -> HashMap<PathBuf, Result<Source, String>> {
    let mut out = HashMap::new();
    for e in &manifest.run {
        let (path, is_stream) = match (&e.stream, &e.matrix) {
            (Some(p), None) => (p, true),
            (None, Some(p)) => (p, false),
            _ => continue,
        };
        let full = base.join(path);
        out.entry(full.clone()).or_insert_with(|| {
            if is_stream {
                read_stream(&full).map(|s| Source::Stream(Arc::new(s))).map_err(|e| e.to_string())
            } else {
                read_matrix_path(&full)
                    .map(|m| Source::Matrix(Arc::new(column_net(&m))))
                    .map_err(|e| format!("{}: {e}", full.display()))
            }
        });
    }
    out
}

fn run_one(entry: &RunEntry, seed: u64, source: Result<Source, String>) -> BenchRow {
    let mut row = BenchRow {
        algorithm: entry.label(),
        k: entry.parts,
        seed,
        cut: String::new(),
        imbalance: None,
        entries: None,
        aux_ints: None,
        wall_s: None,
        pins_per_s: None,
    };
    let result = source.and_then(|src| {
        let stream = match src {
            Source::Stream(s) => s,
            Source::Matrix(hg) => Arc::new(stream_order(&hg, seed)),
        };
        let (cfg, refine) = entry.params().configs(seed).map_err(|e| e.to_string())?;
        execute(&cfg, refine.as_ref(), &stream, &RunOptions::default()).map_err(|e| e.to_string())
    });
    match result {
        Ok(job) => {
            let s = job.stats;
            row.cut = s.cut.to_string();
            row.imbalance = Some(s.imbalance);
            row.entries = Some(s.entries);
            row.aux_ints = Some(s.aux_ints);
            row.wall_s = Some(s.elapsed_seconds);
            row.pins_per_s = Some(if s.elapsed_seconds > 0.0 {
                s.pins as f64 / s.elapsed_seconds
            } else {
                0.0
            });
        }
        Err(msg) => {
            log::warn!("{} K={} seed={seed}: {msg}", row.algorithm, row.k);
            row.cut = format!("error: {msg}");
        }
    }
    row
}

/// Runs every (entry, seed) pair of the manifest.
pub fn run_manifest(manifest: &Manifest, base: &Path) -> Vec<BenchRow> {
    let sources = load_sources(manifest, base);
    let tasks: Vec<(&RunEntry, u64)> = manifest
        .run
        .iter()
        .flat_map(|e| e.seeds.iter().map(move |&s| (e, s)))
        .collect();
    tasks
        .par_iter()
        .map(|&(entry, seed)| {
            let src = match (&entry.stream, &entry.matrix) {
                (Some(p), None) | (None, Some(p)) => sources[&base.join(p)].clone(),
                _ => Err("exactly one of `stream` and `matrix` must be given".to_string()),
            };
            run_one(entry, seed, src)
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[BenchRow], w: W) -> CliResult {
    let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let csv_err = |e: csv::Error| CliError::Input(e.to_string());
    csv.write_record(HEADER).map_err(csv_err)?;
    for r in rows {
        csv.serialize(r).map_err(csv_err)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn parse_manifest(text: &str) -> CliResult<Manifest> {
    toml::from_str(text).map_err(|e| CliError::Input(format!("manifest: {e}")))
}

pub fn run(a: &BenchArgs) -> CliResult {
    let manifest = parse_manifest(&read_text(&a.manifest)?)?;
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let rows = match a.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| run_manifest(&manifest, base)),
        None => run_manifest(&manifest, base),
    };
    match &a.out {
        Some(p) => write_csv(
            &rows,
            std::fs::File::create(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        ),
        None => write_csv(&rows, io::stdout().lock()),
    }
}
