//! Buffered refinement on top of net-to-part streaming.
//!
//! Selected elements are kept in a pin-bounded buffer. When it fills (and
//! once more at the end of the stream) every buffered vertex is lifted out
//! of its part and placed again with the usual saving rule, `passes` times.

mod buffer;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use buffer::RefineBuffer;

use crate::ingest::{StreamFile, StreamHeader};
use crate::metrics::connectivity_cutsize;
use crate::partitioners::{
    choose_by_connectivity, drive, ActivePartScratch, PartitionerConfig, RunOptions, RunStats, StreamPartitioner,
};
use crate::partitioners::Algorithm;
use crate::state::PartitionState;
use crate::{ConnectivityMode, Error, Hypergraph, NetConnectivity, NetId, PartId, Result, StreamElement, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RefineStrategy {
    #[serde(rename = "ref")]
    Ref,
    #[serde(rename = "ref-rlx")]
    RefRlx,
    #[serde(rename = "ref-rlx-sv")]
    RefRlxSv,
}

impl RefineStrategy {
    pub const ALL: [RefineStrategy; 3] = [RefineStrategy::Ref, RefineStrategy::RefRlx, RefineStrategy::RefRlxSv];

    pub fn name(self) -> &'static str {
        match self {
            RefineStrategy::Ref => "ref",
            RefineStrategy::RefRlx => "ref-rlx",
            RefineStrategy::RefRlxSv => "ref-rlx-sv",
        }
    }
}

impl fmt::Display for RefineStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RefineStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase().replace('_', "-");
        RefineStrategy::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown refinement strategy `{s}`")))
    }
}

/// Buffer size, either relative to the total pin count or absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BufferCapacity {
    Fraction(f64),
    Pins(u64),
}

impl BufferCapacity {
    /// Capacity in pins for a stream with `total_pins` pins.
    pub fn resolve(self, total_pins: u64) -> u64 {
        match self {
            BufferCapacity::Fraction(f) => (f * total_pins as f64).floor() as u64,
            BufferCapacity::Pins(b) => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineConfig {
    pub strategy: RefineStrategy,
    pub passes: u32,
    pub capacity: BufferCapacity,
    /// Largest degree buffered under `ref-rlx-sv`. `None` uses the ceiling
    /// of the mean degree seen so far.
    pub threshold: Option<u32>,
}

impl RefineConfig {
    pub fn new(strategy: RefineStrategy) -> Self {
        RefineConfig {
            strategy,
            passes: 4,
            capacity: BufferCapacity::Fraction(0.15),
            threshold: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.passes == 0 {
            return Err(Error::Config("passes must be at least 1".into()));
        }
        if let BufferCapacity::Fraction(f) = self.capacity {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::Config(format!("buffer fraction must lie in (0, 1], got {f}")));
            }
        }
        Ok(())
    }
}

/// Nets of the vertex in `p` whose only counted pin in `p` is this vertex,
/// and which touch another part: the cut drop from lifting the vertex out.
pub fn leave_gain(conn: &NetConnectivity, nets: &[NetId], p: PartId) -> Result<u32> {
    let mut gain = 0;
    for &n in nets {
        let c = conn
            .pin_count(n, p)
            .ok_or_else(|| Error::Invariant("leave gain needs counted connectivity".into()))?;
        match c {
            0 => {
                return Err(Error::Invariant(format!("net {n} has no counted pin in part {p}")));
            }
            1 if conn.lambda(n) > 1 => gain += 1,
            _ => {}
        }
    }
    Ok(gain)
}

pub fn is_bufferable(strategy: RefineStrategy, degree: usize, threshold: u32) -> bool {
    match strategy {
        RefineStrategy::Ref | RefineStrategy::RefRlx => true,
        RefineStrategy::RefRlxSv => degree <= threshold as usize,
    }
}

pub fn is_moveable(strategy: RefineStrategy, gain: u32) -> bool {
    match strategy {
        RefineStrategy::Ref => gain > 0,
        RefineStrategy::RefRlx | RefineStrategy::RefRlxSv => true,
    }
}

/// Lifts `v` out of its part, dropping its pins from the counts.
pub fn remove_vertex(
    state: &mut PartitionState,
    conn: &mut NetConnectivity,
    v: VertexId,
    nets: &[NetId],
) -> Result<PartId> {
    let p = state.unassign(v)?;
    for &n in nets {
        conn.remove_pin(n, p)?;
    }
    Ok(p)
}

/// Places a lifted vertex with the net-to-part saving rule.
pub fn reinsert_vertex(
    state: &mut PartitionState,
    conn: &mut NetConnectivity,
    scratch: &mut ActivePartScratch,
    v: VertexId,
    nets: &[NetId],
) -> PartId {
    let p = choose_by_connectivity(state, conn, scratch, nets);
    state.assign(v, p);
    for &n in nets {
        conn.add_pin(n, p);
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveEvent {
    /// Elements streamed when the flush started.
    pub stream_position: u64,
    pub pass: u32,
    pub vertex: VertexId,
    pub from: PartId,
    pub to: PartId,
    pub gain: u32,
}

/// One line of the flush trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlushRecord {
    pub stream_position: u64,
    pub cut_before: u64,
    pub cut_after: u64,
    /// Lifts that ended in a different part.
    pub moves: u64,
    pub pass_count: u32,
}

/// Hooks into a refined run; both are called after the fact.
pub trait RefineObserver {
    fn on_move(&mut self, _event: &MoveEvent, _state: &PartitionState, _conn: &NetConnectivity) -> Result<()> {
        Ok(())
    }

    fn on_flush(&mut self, _record: &FlushRecord, _state: &PartitionState, _conn: &NetConnectivity) -> Result<()> {
        Ok(())
    }
}

/// Sweeps the buffer `passes` times and empties it.
pub fn refine_flush(
    state: &mut PartitionState,
    conn: &mut NetConnectivity,
    scratch: &mut ActivePartScratch,
    buf: &mut RefineBuffer,
    cfg: &RefineConfig,
    stream_position: u64,
    mut observer: Option<&mut dyn RefineObserver>,
) -> Result<FlushRecord> {
    let cut_before = conn.cut();
    let mut moves = 0;
    for pass in 0..cfg.passes {
        for elem in buf.elements() {
            let from = state
                .part_of(elem.vertex)
                .ok_or_else(|| Error::Invariant(format!("buffered vertex {} is unassigned", elem.vertex)))?;
            let gain = leave_gain(conn, &elem.nets, from)?;
            if !is_moveable(cfg.strategy, gain) {
                continue;
            }
            remove_vertex(state, conn, elem.vertex, &elem.nets)?;
            let to = reinsert_vertex(state, conn, scratch, elem.vertex, &elem.nets);
            if to != from {
                moves += 1;
            }
            if let Some(obs) = observer.as_deref_mut() {
                let ev = MoveEvent {
                    stream_position,
                    pass,
                    vertex: elem.vertex,
                    from,
                    to,
                    gain,
                };
                obs.on_move(&ev, state, conn)?;
            }
        }
    }
    buf.clear();
    let record = FlushRecord {
        stream_position,
        cut_before,
        cut_after: conn.cut(),
        moves,
        pass_count: cfg.passes,
    };
    if let Some(obs) = observer {
        obs.on_flush(&record, state, conn)?;
    }
    Ok(record)
}

/// Checks the counted connectivity against the streamed prefix.
struct Audit {
    vertices: usize,
    nets: usize,
    history: Vec<StreamElement>,
}

impl Audit {
    fn check(&self, state: &PartitionState, conn: &NetConnectivity) -> Result<()> {
        let hg = Hypergraph::from_elements(self.vertices, self.nets, &self.history)?;
        let mut parts = state.part_vector().to_vec();
        parts.resize(self.vertices.max(parts.len()), crate::UNASSIGNED);
        let oracle = connectivity_cutsize(&hg, &parts)?;
        if oracle != conn.cut() {
            return Err(Error::Invariant(format!(
                "tracked cut {} differs from recomputed {oracle} after {} elements",
                conn.cut(),
                self.history.len()
            )));
        }
        for n in 0..self.nets as NetId {
            let counted: u64 = conn.counts(n).unwrap_or(&[]).iter().map(|&c| c as u64).sum();
            if counted != hg.pins(n).len() as u64 {
                return Err(Error::Invariant(format!(
                    "net {n} counts {counted} pins, {} are placed",
                    hg.pins(n).len()
                )));
            }
        }
        Ok(())
    }
}

/// Net-to-part streaming with buffered refinement.
pub struct RefinedPartitioner<'o> {
    state: PartitionState,
    conn: NetConnectivity,
    scratch: ActivePartScratch,
    buf: RefineBuffer,
    cfg: RefineConfig,
    position: u64,
    pins_seen: u64,
    trace: Vec<FlushRecord>,
    observer: Option<&'o mut dyn RefineObserver>,
    audit: Option<Audit>,
    oversize: u64,
}

impl<'o> RefinedPartitioner<'o> {
    pub fn new(config: &PartitionerConfig, refine: &RefineConfig, header: &StreamHeader) -> Result<Self> {
        config.validate()?;
        refine.validate()?;
        if config.algorithm != Algorithm::MinMaxN2p {
            return Err(Error::Config(format!(
                "refinement runs on minmax-n2p, not {}",
                config.algorithm
            )));
        }
        Ok(RefinedPartitioner {
            state: PartitionState::with_capacity(config.parts, config.beta, header.vertices as usize)?,
            conn: NetConnectivity::with_nets(ConnectivityMode::Counted, header.nets as usize),
            scratch: ActivePartScratch::new(config.parts),
            buf: RefineBuffer::new(refine.capacity.resolve(header.pins)),
            cfg: refine.clone(),
            position: 0,
            pins_seen: 0,
            trace: Vec::new(),
            observer: None,
            audit: None,
            oversize: 0,
        })
    }

    pub fn with_observer(mut self, observer: &'o mut dyn RefineObserver) -> Self {
        self.observer = Some(observer);
        self
    }

    /// Keeps the streamed elements so every flush can be checked against
    /// a from-scratch cut.
    pub fn with_audit(mut self, header: &StreamHeader) -> Self {
        self.audit = Some(Audit {
            vertices: header.vertices as usize,
            nets: header.nets as usize,
            history: Vec::new(),
        });
        self
    }

    pub fn connectivity(&self) -> &NetConnectivity {
        &self.conn
    }

    pub fn buffer(&self) -> &RefineBuffer {
        &self.buf
    }

    pub fn trace(&self) -> &[FlushRecord] {
        &self.trace
    }

    pub fn into_trace(self) -> Vec<FlushRecord> {
        self.trace
    }

    /// Degree bound in force for `ref-rlx-sv`.
    pub fn threshold(&self) -> u32 {
        self.cfg
            .threshold
            .unwrap_or_else(|| self.pins_seen.div_ceil(self.position.max(1)) as u32)
    }

    /// Vertices too large for the buffer that were left unbuffered.
    pub fn oversized(&self) -> u64 {
        self.oversize
    }

    fn flush(&mut self) -> Result<()> {
        if let Some(a) = &self.audit {
            a.check(&self.state, &self.conn)?;
        }
        let audit_balance = self.audit.is_some();
        let mut guard = BalanceGuard {
            inner: self.observer.as_deref_mut(),
            check: audit_balance,
        };
        let rec = refine_flush(
            &mut self.state,
            &mut self.conn,
            &mut self.scratch,
            &mut self.buf,
            &self.cfg,
            self.position,
            Some(&mut guard),
        )?;
        if let Some(a) = &self.audit {
            a.check(&self.state, &self.conn)?;
        }
        log::debug!(
            "flush at {}: cut {} -> {}, {} moves",
            rec.stream_position,
            rec.cut_before,
            rec.cut_after,
            rec.moves
        );
        self.trace.push(rec);
        Ok(())
    }
}

/// Checks the balance bound after each move, then forwards to the user's
/// observer.
struct BalanceGuard<'a, 'o> {
    inner: Option<&'a mut (dyn RefineObserver + 'o)>,
    check: bool,
}

impl RefineObserver for BalanceGuard<'_, '_> {
    fn on_move(&mut self, ev: &MoveEvent, state: &PartitionState, conn: &NetConnectivity) -> Result<()> {
        if self.check && state.imbalance() > state.slack() {
            return Err(Error::Invariant(format!(
                "imbalance {} exceeds slack {} after moving vertex {}",
                state.imbalance(),
                state.slack(),
                ev.vertex
            )));
        }
        match self.inner.as_deref_mut() {
            Some(o) => o.on_move(ev, state, conn),
            None => Ok(()),
        }
    }

    fn on_flush(&mut self, rec: &FlushRecord, state: &PartitionState, conn: &NetConnectivity) -> Result<()> {
        match self.inner.as_deref_mut() {
            Some(o) => o.on_flush(rec, state, conn),
            None => Ok(()),
        }
    }
}

impl StreamPartitioner for RefinedPartitioner<'_> {
    fn place(&mut self, elem: &StreamElement) -> Result<PartId> {
        if self.state.part_of(elem.vertex).is_some() {
            return Err(Error::Input(format!("vertex {} streamed twice", elem.vertex)));
        }
        let p = crate::partitioners::step_minmax_n2p(&mut self.state, &mut self.conn, &mut self.scratch, elem);
        self.position += 1;
        self.pins_seen += elem.degree() as u64;
        if let Some(a) = self.audit.as_mut() {
            a.history.push(elem.clone());
        }
        if self.buf.capacity() == 0 || !is_bufferable(self.cfg.strategy, elem.degree(), self.threshold()) {
            return Ok(p);
        }
        if elem.degree() as u64 > self.buf.capacity() {
            if self.oversize == 0 {
                log::warn!(
                    "vertex {} has {} nets, more than the buffer holds ({}); not buffered",
                    elem.vertex,
                    elem.degree(),
                    self.buf.capacity()
                );
            }
            self.oversize += 1;
            return Ok(p);
        }
        if !self.buf.fits(elem) {
            self.flush()?;
            return Ok(p);
        }
        self.buf.push(elem.clone())?;
        if self.buf.is_full() {
            self.flush()?;
        }
        Ok(p)
    }

    fn finish(&mut self) -> Result<()> {
        if !self.buf.is_empty() {
            self.flush()?;
        }
        if self.oversize > 1 {
            log::warn!("{} vertices did not fit the buffer", self.oversize);
        }
        Ok(())
    }

    fn state(&self) -> &PartitionState {
        &self.state
    }

    fn entries(&self) -> u64 {
        self.conn.entry_count()
    }

    /// Counted lists, scratch, and the buffered pins.
    fn aux_integers(&self) -> u64 {
        self.conn.aux_integers() + self.scratch.aux_integers() + self.buf.load() + 2 * self.buf.len() as u64
    }

    fn revisits(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone)]
pub struct RefinedOutput {
    pub parts: Vec<PartId>,
    pub stats: RunStats,
    pub trace: Vec<FlushRecord>,
    pub refine_seconds: f64,
}

/// Streams with counted net-to-part connectivity and buffered refinement.
/// `config.algorithm` must be `minmax-n2p`.
pub fn run_refined(
    config: &PartitionerConfig,
    refine: &RefineConfig,
    stream: &StreamFile,
    options: &RunOptions,
    observer: Option<&mut dyn RefineObserver>,
) -> Result<RefinedOutput> {
    let mut p = RefinedPartitioner::new(config, refine, &stream.header)?;
    if let Some(o) = observer {
        p = p.with_observer(o);
    }
    if options.audit {
        p = p.with_audit(&stream.header);
    }
    let start = Instant::now();
    let label = format!("{}+{}", config.algorithm.name(), refine.strategy.name());
    let out = drive(&mut p, stream, options, &label, config.seed)?;
    let refine_seconds = start.elapsed().as_secs_f64();
    Ok(RefinedOutput {
        parts: out.parts,
        stats: out.stats,
        trace: p.into_trace(),
        refine_seconds,
    })
}
