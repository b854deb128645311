//! One-pass streaming partitioners and the shared driver loop.

mod minmax;
mod n2p;
mod random;
mod scratch;
mod sketched;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use minmax::{step_minmax, PartToNet};
pub use n2p::{step_minmax_l, step_minmax_n2p, LimitedConnectivity};
pub use random::step_random;
pub use scratch::{choose_by_connectivity, ActivePartScratch, PartLists};
pub use sketched::{step_minmax_bf, step_minmax_mh};

use crate::ingest::{seeded_rng, StreamFile, StreamHeader};
use crate::metrics::connectivity_cutsize;
use crate::sketch::{BloomFilter, MinHashFamily, MERSENNE_31};
use crate::state::PartitionState;
use crate::{ConnectivityMode, Error, NetConnectivity, PartId, Result, StreamElement, UNASSIGNED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Random,
    #[serde(rename = "minmax")]
    MinMax,
    #[serde(rename = "minmax-n2p")]
    MinMaxN2p,
    #[serde(rename = "minmax-l")]
    MinMaxL,
    #[serde(rename = "minmax-bf")]
    MinMaxBf,
    #[serde(rename = "minmax-mh")]
    MinMaxMh,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Random,
        Algorithm::MinMax,
        Algorithm::MinMaxN2p,
        Algorithm::MinMaxL,
        Algorithm::MinMaxBf,
        Algorithm::MinMaxMh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Random => "random",
            Algorithm::MinMax => "minmax",
            Algorithm::MinMaxN2p => "minmax-n2p",
            Algorithm::MinMaxL => "minmax-l",
            Algorithm::MinMaxBf => "minmax-bf",
            Algorithm::MinMaxMh => "minmax-mh",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                Error::Config(format!("unknown algorithm `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionerConfig {
    pub algorithm: Algorithm,
    pub parts: u32,
    pub beta: f64,
    /// Slots per net for `minmax-l`.
    pub ell: usize,
    pub bf_bits: u64,
    pub bf_hashes: u32,
    pub mh_hashes: usize,
    pub mh_modulus: u64,
    pub seed: u64,
}

impl PartitionerConfig {
    pub fn new(algorithm: Algorithm, parts: u32) -> Self {
        PartitionerConfig {
            algorithm,
            parts,
            beta: 0.1,
            ell: 5,
            bf_bits: 20_000_000,
            bf_hashes: 4,
            mh_hashes: 4,
            mh_modulus: MERSENNE_31,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.parts < 2 {
            return Err(Error::Config(format!("part count must be at least 2, got {}", self.parts)));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::Config(format!("beta must be finite and non-negative, got {}", self.beta)));
        }
        match self.algorithm {
            Algorithm::MinMaxL if self.ell == 0 => Err(Error::Config("ell must be at least 1".into())),
            Algorithm::MinMaxBf if self.bf_hashes == 0 || self.bf_bits < self.bf_hashes as u64 => Err(Error::Config(
                format!("need bits >= hashes >= 1, got bits {} hashes {}", self.bf_bits, self.bf_hashes),
            )),
            Algorithm::MinMaxMh if self.mh_hashes == 0 => Err(Error::Config("MinHash needs at least one hash".into())),
            _ => Ok(()),
        }
    }
}

/// A streaming partitioner consumes one element at a time and never
/// revisits earlier decisions (refinement aside).
pub trait StreamPartitioner {
    fn place(&mut self, elem: &StreamElement) -> Result<PartId>;

    /// Called once after the last element.
    fn finish(&mut self) -> Result<()> {
        Ok(())
    }

    fn state(&self) -> &PartitionState;

    /// Connectivity entries currently stored.
    fn entries(&self) -> u64;

    /// Auxiliary integer slots currently held, including scratch space.
    fn aux_integers(&self) -> u64;

    /// True if earlier placements can change after `place` returns.
    fn revisits(&self) -> bool {
        false
    }
}

#[allow(clippy::large_enum_variant)]
enum Engine {
    Random(ChaCha8Rng),
    MinMax(PartToNet),
    N2p(NetConnectivity, ActivePartScratch),
    Limited(LimitedConnectivity, ActivePartScratch, ChaCha8Rng),
    Bloom(BloomFilter),
    MinHash(MinHashFamily),
}

/// Any of the six one-pass algorithms behind one type.
pub struct Partitioner {
    state: PartitionState,
    engine: Engine,
}

impl Partitioner {
    pub fn new(config: &PartitionerConfig, header: &StreamHeader) -> Result<Self> {
        config.validate()?;
        let k = config.parts;
        let state = PartitionState::with_capacity(k, config.beta, header.vertices as usize)?;
        let engine = match config.algorithm {
            Algorithm::Random => Engine::Random(seeded_rng(config.seed)),
            Algorithm::MinMax => Engine::MinMax(PartToNet::new(k)),
            Algorithm::MinMaxN2p => Engine::N2p(
                NetConnectivity::with_nets(ConnectivityMode::SetOnly, header.nets as usize),
                ActivePartScratch::new(k),
            ),
            Algorithm::MinMaxL => Engine::Limited(
                LimitedConnectivity::new(config.ell, k),
                ActivePartScratch::new(k),
                seeded_rng(config.seed),
            ),
            Algorithm::MinMaxBf => Engine::Bloom(BloomFilter::new(config.bf_bits, config.bf_hashes)?),
            Algorithm::MinMaxMh => {
                Engine::MinHash(MinHashFamily::new(config.mh_hashes, config.mh_modulus, config.seed)?)
            }
        };
        Ok(Partitioner { state, engine })
    }

    /// The exact net-to-part lists, for the algorithms that keep them.
    pub fn connectivity(&self) -> Option<&NetConnectivity> {
        match &self.engine {
            Engine::N2p(c, _) => Some(c),
            _ => None,
        }
    }

    pub fn part_to_net(&self) -> Option<&PartToNet> {
        match &self.engine {
            Engine::MinMax(p) => Some(p),
            _ => None,
        }
    }

    pub fn bloom(&self) -> Option<&BloomFilter> {
        match &self.engine {
            Engine::Bloom(b) => Some(b),
            _ => None,
        }
    }
}

impl StreamPartitioner for Partitioner {
    fn place(&mut self, elem: &StreamElement) -> Result<PartId> {
        if self.state.part_of(elem.vertex).is_some() {
            return Err(Error::Input(format!("vertex {} streamed twice", elem.vertex)));
        }
        let st = &mut self.state;
        Ok(match &mut self.engine {
            Engine::Random(rng) => step_random(st, rng, elem),
            Engine::MinMax(p2n) => step_minmax(st, p2n, elem),
            Engine::N2p(conn, sc) => step_minmax_n2p(st, conn, sc, elem),
            Engine::Limited(conn, sc, rng) => step_minmax_l(st, conn, sc, elem, rng),
            Engine::Bloom(bf) => step_minmax_bf(st, bf, elem),
            Engine::MinHash(fam) => step_minmax_mh(st, fam, elem),
        })
    }

    fn state(&self) -> &PartitionState {
        &self.state
    }

    /// For the Bloom filter this is the number of insertions.
    fn entries(&self) -> u64 {
        match &self.engine {
            Engine::Random(_) | Engine::MinHash(_) => 0,
            Engine::MinMax(p) => p.entries(),
            Engine::N2p(c, _) => c.entry_count(),
            Engine::Limited(c, _, _) => c.entry_count(),
            Engine::Bloom(b) => b.inserted(),
        }
    }

    fn aux_integers(&self) -> u64 {
        match &self.engine {
            Engine::Random(_) => 0,
            Engine::MinMax(p) => 2 * p.words(),
            Engine::N2p(c, sc) => c.aux_integers() + sc.aux_integers(),
            Engine::Limited(c, sc, _) => c.slot_count() + 2 * c.nets_seen() + sc.aux_integers(),
            Engine::Bloom(b) => 2 * b.words() as u64,
            Engine::MinHash(f) => 2 * f.len() as u64,
        }
    }
}

/// Builds the partitioner named by `config`.
pub fn build(config: &PartitionerConfig, header: &StreamHeader) -> Result<Box<dyn StreamPartitioner>> {
    Ok(Box::new(Partitioner::new(config, header)?))
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Number of evenly spaced prefixes at which the exact cut is recorded.
    pub checkpoints: usize,
    /// Check the balance bound after every placement.
    pub audit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub vertices: u64,
    pub nets_seen: u64,
    pub pins: u64,
    pub cut: u64,
    pub imbalance: u64,
    pub entries: u64,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub algorithm: String,
    pub parts: u32,
    pub seed: u64,
    pub vertices: u64,
    pub nets_seen: u64,
    pub pins: u64,
    pub cut: u64,
    pub imbalance: u64,
    pub entries: u64,
    pub peak_entries: u64,
    pub aux_ints: u64,
    pub empty_parts: usize,
    pub elapsed_seconds: f64,
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub parts: Vec<PartId>,
    pub stats: RunStats,
}

/// Stream positions (element counts) after which a checkpoint is taken.
pub fn checkpoint_positions(len: usize, count: usize) -> Vec<usize> {
    if count == 0 || len == 0 {
        return Vec::new();
    }
    let mut out: Vec<usize> = (1..=count).map(|j| (j * len).div_ceil(count)).collect();
    out.dedup();
    out
}

fn padded_parts(state: &PartitionState, len: usize) -> Vec<PartId> {
    let mut parts = state.part_vector().to_vec();
    parts.resize(len.max(parts.len()), UNASSIGNED);
    parts
}

/// Runs `partitioner` over `stream` and scores the result with the
/// from-scratch cut. `label` and `seed` only go into the stats.
pub fn drive(
    partitioner: &mut dyn StreamPartitioner,
    stream: &StreamFile,
    options: &RunOptions,
    label: &str,
    seed: u64,
) -> Result<RunOutput> {
    let h = &stream.header;
    let k = partitioner.state().k();
    if k as u64 > h.vertices {
        log::warn!("{k} parts for {} vertices: some parts will stay empty", h.vertices);
    }
    let marks = checkpoint_positions(stream.len(), options.checkpoints);
    let mut next_mark = 0;
    let mut seen = vec![false; h.nets as usize];
    let mut nets_seen = 0u64;
    let mut pins = 0u64;
    let mut peak_entries = 0u64;
    let mut peak_aux = 0u64;
    let mut elapsed = 0.0f64;
    let mut checkpoints = Vec::with_capacity(marks.len());

    for (i, elem) in stream.elements.iter().enumerate() {
        let start = Instant::now();
        let before = partitioner.state().slack();
        partitioner.place(elem)?;
        if i + 1 == stream.len() {
            partitioner.finish()?;
        }
        elapsed += start.elapsed().as_secs_f64();

        for &n in &elem.nets {
            if let Some(s) = seen.get_mut(n as usize) {
                if !*s {
                    *s = true;
                    nets_seen += 1;
                }
            }
        }
        pins += elem.nets.len() as u64;
        peak_entries = peak_entries.max(partitioner.entries());
        peak_aux = peak_aux.max(partitioner.aux_integers());

        if options.audit {
            let st = partitioner.state();
            let bound = if partitioner.revisits() { st.slack() } else { before };
            if st.imbalance() > bound {
                return Err(Error::Invariant(format!(
                    "imbalance {} exceeds slack {bound} after {} vertices",
                    st.imbalance(),
                    i + 1
                )));
            }
        }

        if marks.get(next_mark) == Some(&(i + 1)) {
            next_mark += 1;
            let prefix = stream.prefix_hypergraph(i + 1)?;
            let st = partitioner.state();
            let cut = connectivity_cutsize(&prefix, &padded_parts(st, prefix.num_vertices()))?;
            checkpoints.push(Checkpoint {
                vertices: (i + 1) as u64,
                nets_seen,
                pins,
                cut,
                imbalance: st.imbalance(),
                entries: partitioner.entries(),
                elapsed_seconds: elapsed,
            });
        }
    }
    if stream.is_empty() {
        partitioner.finish()?;
    }

    let entries = partitioner.entries();
    let state = partitioner.state();
    let parts = padded_parts(state, h.vertices as usize);
    let cut = connectivity_cutsize(&stream.hypergraph()?, &parts)?;
    let stats = RunStats {
        algorithm: label.to_string(),
        parts: k,
        seed,
        vertices: stream.len() as u64,
        nets_seen,
        pins,
        cut,
        imbalance: state.imbalance(),
        entries,
        peak_entries,
        aux_ints: peak_aux,
        empty_parts: state.empty_parts(),
        elapsed_seconds: elapsed,
        checkpoints,
    };
    Ok(RunOutput { parts, stats })
}

/// Partitions `stream` in one pass with the algorithm named by `config`.
pub fn run(config: &PartitionerConfig, stream: &StreamFile, options: &RunOptions) -> Result<RunOutput> {
    let mut p = build(config, &stream.header)?;
    drive(p.as_mut(), stream, options, config.algorithm.name(), config.seed)
}
