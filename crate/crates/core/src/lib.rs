//! Streaming hypergraph partitioning with bounded memory.
//!
//! Vertices of a hypergraph arrive one at a time together with their net
//! lists and must be placed into one of `K` parts immediately, keeping the
//! part sizes within a dynamic slack of each other. The crate provides
//!
//! * the partition state and balance law ([`state`]),
//! * net-to-part connectivity bookkeeping ([`connectivity`]),
//! * an exact connectivity−1 cutsize oracle ([`metrics`]),
//! * Matrix Market ingestion, the column-net model and replayable stream
//!   files ([`ingest`]),
//! * Bloom filter and MinHash sketches ([`sketch`]),
//! * six one-pass partitioners ([`partitioners`]),
//! * buffered refinement on top of the net-to-part partitioner ([`refine`]).
//!
//! ```
//! use streamhp::ingest::{column_net, parse_matrix, stream_order};
//! use streamhp::partitioners::{run, Algorithm, PartitionerConfig, RunOptions};
//!
//! let mtx = "%%MatrixMarket matrix coordinate pattern general\n4 3 4\n1 1\n2 1\n2 2\n3 2\n";
//! let hg = column_net(&parse_matrix(mtx)?);
//! let stream = stream_order(&hg, 7);
//! let config = PartitionerConfig::new(Algorithm::MinMaxN2p, 2);
//! let out = run(&config, &stream, &RunOptions::default())?;
//! assert_eq!(out.parts.len(), 4);
//! # Ok::<(), streamhp::Error>(())
//! ```

pub mod connectivity;
mod error;
pub mod hypergraph;
pub mod ingest;
pub mod metrics;
pub mod partitioners;
pub mod refine;
pub mod sketch;
pub mod state;

pub use connectivity::{ConnectivityMode, NetConnectivity};
pub use error::{Error, Result};
pub use hypergraph::{Hypergraph, StreamElement};
pub use metrics::connectivity_cutsize;
pub use state::{dynamic_slack, PartitionState};

pub type VertexId = u32;
pub type NetId = u32;
pub type PartId = u32;

/// Sentinel stored in part vectors for vertices that have not been placed.
pub const UNASSIGNED: PartId = PartId::MAX;
