//! Replayable stream files.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//! 0       8     magic  b"SHPSTRM\0"
//! 8       4     version (u32) = 1
//! 12      4     reserved (u32) = 0
//! 16      8     vertex count (u64)
//! 24      8     net count (u64)
//! 32      8     pin count (u64)
//! 40      8     ordering seed (u64)
//! 48      ...   vertex-count records, in stream order:
//!               vertex id (u32), degree d (u32), d net ids (u32 each)
//! ```

use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Hypergraph, NetId, Result, StreamElement, VertexId};

pub const MAGIC: [u8; 8] = *b"SHPSTRM\0";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamHeader {
    pub vertices: u64,
    pub nets: u64,
    pub pins: u64,
    pub seed: u64,
}

/// A full vertex stream held in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamFile {
    pub header: StreamHeader,
    pub elements: Vec<StreamElement>,
}

impl StreamFile {
    /// Wraps elements produced elsewhere, validating the permutation and
    /// pin invariants.
    pub fn new(header: StreamHeader, elements: Vec<StreamElement>) -> Result<Self> {
        let s = StreamFile { header, elements };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let h = &self.header;
        if self.elements.len() as u64 != h.vertices {
            return Err(Error::StreamFormat(format!(
                "header declares {} vertices, stream holds {}",
                h.vertices,
                self.elements.len()
            )));
        }
        let mut seen = vec![false; h.vertices as usize];
        let mut pins = 0u64;
        for e in &self.elements {
            let v = e.vertex as usize;
            if v >= seen.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::StreamFormat(format!(
                    "vertex {} is out of range or repeated",
                    e.vertex
                )));
            }
            for (i, &n) in e.nets.iter().enumerate() {
                if n as u64 >= h.nets || e.nets[..i].contains(&n) {
                    return Err(Error::StreamFormat(format!(
                        "vertex {} has an out-of-range or repeated net {n}",
                        e.vertex
                    )));
                }
            }
            pins += e.nets.len() as u64;
        }
        if pins != h.pins {
            return Err(Error::StreamFormat(format!(
                "header declares {} pins, stream holds {pins}",
                h.pins
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Rebuilds the offline hypergraph the stream was cut from.
    pub fn hypergraph(&self) -> Result<Hypergraph> {
        Hypergraph::from_elements(
            self.header.vertices as usize,
            self.header.nets as usize,
            &self.elements,
        )
    }

    /// Hypergraph over the first `len` elements only.
    pub fn prefix_hypergraph(&self, len: usize) -> Result<Hypergraph> {
        Hypergraph::from_elements(
            self.header.vertices as usize,
            self.header.nets as usize,
            &self.elements[..len],
        )
    }

    pub fn write_to<W: Write>(&self, w: W) -> io::Result<()> {
        let mut w = BufWriter::new(w);
        let h = &self.header;
        w.write_all(&MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&0u32.to_le_bytes())?;
        for x in [h.vertices, h.nets, h.pins, h.seed] {
            w.write_all(&x.to_le_bytes())?;
        }
        for e in &self.elements {
            w.write_all(&e.vertex.to_le_bytes())?;
            w.write_all(&(e.nets.len() as u32).to_le_bytes())?;
            for &n in &e.nets {
                w.write_all(&n.to_le_bytes())?;
            }
        }
        w.flush()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.elements.len() + 4 * self.header.pins as usize);
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut r = BufReader::new(r);
        let mut magic = [0u8; 8];
        read_exact(&mut r, &mut magic, "magic")?;
        if magic != MAGIC {
            return Err(Error::StreamFormat("bad magic, not a stream file".into()));
        }
        let version = read_u32(&mut r, "version")?;
        if version != VERSION {
            return Err(Error::StreamFormat(format!("unsupported version {version}")));
        }
        read_u32(&mut r, "reserved")?;
        let header = StreamHeader {
            vertices: read_u64(&mut r, "vertex count")?,
            nets: read_u64(&mut r, "net count")?,
            pins: read_u64(&mut r, "pin count")?,
            seed: read_u64(&mut r, "seed")?,
        };
        if header.vertices > u32::MAX as u64 + 1 || header.nets > u32::MAX as u64 + 1 {
            return Err(Error::StreamFormat("counts exceed 32-bit ids".into()));
        }
        let mut elements = Vec::with_capacity(header.vertices.min(1 << 24) as usize);
        for _ in 0..header.vertices {
            let vertex: VertexId = read_u32(&mut r, "vertex id")?;
            let degree = read_u32(&mut r, "degree")? as usize;
            if degree as u64 > header.nets {
                return Err(Error::StreamFormat(format!("vertex {vertex} has degree {degree} above net count")));
            }
            let mut nets: Vec<NetId> = Vec::with_capacity(degree);
            for _ in 0..degree {
                nets.push(read_u32(&mut r, "net id")?);
            }
            elements.push(StreamElement { vertex, nets });
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::StreamFormat("trailing bytes after last record".into()));
        }
        Self::new(header, elements)
    }

    pub fn read_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }

    pub fn write_path(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(std::fs::File::create(path)?)?;
        Ok(())
    }
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => Error::StreamFormat(format!("truncated while reading {what}")),
        _ => Error::Io(e),
    })
}

fn read_u32<R: Read>(r: &mut R, what: &str) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b, what)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R, what: &str) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b, what)?;
    Ok(u64::from_le_bytes(b))
}

/// Seeded generator shared by every randomized component: ChaCha8 seeded
/// through `SeedableRng::seed_from_u64`.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Streams `hg` in a uniformly random vertex order (Fisher–Yates shuffle
/// driven by [`seeded_rng`]).
pub fn stream_order(hg: &Hypergraph, seed: u64) -> StreamFile {
    let mut order: Vec<VertexId> = (0..hg.num_vertices() as VertexId).collect();
    order.shuffle(&mut seeded_rng(seed));
    let elements = order
        .into_iter()
        .map(|v| StreamElement {
            vertex: v,
            nets: hg.nets(v).to_vec(),
        })
        .collect();
    StreamFile {
        header: StreamHeader {
            vertices: hg.num_vertices() as u64,
            nets: hg.num_nets() as u64,
            pins: hg.num_pins() as u64,
            seed,
        },
        elements,
    }
}
