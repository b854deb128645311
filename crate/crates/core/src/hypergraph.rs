//! Offline pin structure and the stream element type.
//!
//! Streaming partitioners never hold a [`Hypergraph`]; it exists for the
//! cutsize oracle, for evaluation and for ingestion.

use serde::{Deserialize, Serialize};

use crate::{Error, NetId, Result, VertexId};

/// One `(v, nets[v])` pair, in stream order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamElement {
    pub vertex: VertexId,
    pub nets: Vec<NetId>,
}

impl StreamElement {
    /// Builds an element, dropping repeated net ids while keeping first-seen order.
    pub fn new(vertex: VertexId, nets: impl IntoIterator<Item = NetId>) -> Self {
        let mut out: Vec<NetId> = Vec::new();
        for n in nets {
            if !out.contains(&n) {
                out.push(n);
            }
        }
        StreamElement { vertex, nets: out }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.nets.len()
    }
}

/// Hypergraph in dual CSR form: `pins[n]` per net and `nets[v]` per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    net_offsets: Vec<usize>,
    pin_list: Vec<VertexId>,
    vertex_offsets: Vec<usize>,
    net_list: Vec<NetId>,
}

impl Hypergraph {
    /// Builds from per-vertex net lists. Net ids must be `< num_nets`.
    pub fn from_vertex_nets<I, L>(num_nets: usize, vertex_nets: I) -> Result<Self>
    where
        I: IntoIterator<Item = L>,
        L: AsRef<[NetId]>,
    {
        let mut vertex_offsets = vec![0usize];
        let mut net_list = Vec::new();
        for nets in vertex_nets {
            let nets = nets.as_ref();
            for (i, &n) in nets.iter().enumerate() {
                if n as usize >= num_nets {
                    return Err(Error::Input(format!(
                        "net id {n} out of range (net count {num_nets})"
                    )));
                }
                if nets[..i].contains(&n) {
                    return Err(Error::Input(format!(
                        "vertex {} lists net {n} twice",
                        vertex_offsets.len() - 1
                    )));
                }
            }
            net_list.extend_from_slice(nets);
            vertex_offsets.push(net_list.len());
        }
        Ok(Self::transpose(num_nets, vertex_offsets, net_list))
    }

    /// Builds from stream elements. Vertices absent from `elements` get
    /// empty net lists, so a stream prefix yields the assigned-prefix
    /// hypergraph.
    pub fn from_elements(num_vertices: usize, num_nets: usize, elements: &[StreamElement]) -> Result<Self> {
        let mut lists: Vec<&[NetId]> = vec![&[]; num_vertices];
        for e in elements {
            let slot = lists.get_mut(e.vertex as usize).ok_or_else(|| {
                Error::Input(format!(
                    "vertex id {} out of range (vertex count {num_vertices})",
                    e.vertex
                ))
            })?;
            *slot = &e.nets;
        }
        Self::from_vertex_nets(num_nets, lists)
    }

    fn transpose(num_nets: usize, vertex_offsets: Vec<usize>, net_list: Vec<NetId>) -> Self {
        let mut net_offsets = vec![0usize; num_nets + 1];
        for &n in &net_list {
            net_offsets[n as usize + 1] += 1;
        }
        for i in 0..num_nets {
            net_offsets[i + 1] += net_offsets[i];
        }
        let mut fill = net_offsets.clone();
        let mut pin_list = vec![0 as VertexId; net_list.len()];
        for v in 0..vertex_offsets.len() - 1 {
            for &n in &net_list[vertex_offsets[v]..vertex_offsets[v + 1]] {
                pin_list[fill[n as usize]] = v as VertexId;
                fill[n as usize] += 1;
            }
        }
        Hypergraph {
            net_offsets,
            pin_list,
            vertex_offsets,
            net_list,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_offsets.len() - 1
    }

    pub fn num_nets(&self) -> usize {
        self.net_offsets.len() - 1
    }

    /// Total pin count `|H|`.
    pub fn num_pins(&self) -> usize {
        self.pin_list.len()
    }

    pub fn pins(&self, n: NetId) -> &[VertexId] {
        let n = n as usize;
        &self.pin_list[self.net_offsets[n]..self.net_offsets[n + 1]]
    }

    pub fn nets(&self, v: VertexId) -> &[NetId] {
        let v = v as usize;
        &self.net_list[self.vertex_offsets[v]..self.vertex_offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.nets(v).len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_vertices() as VertexId)
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }
}
