//! Sparse matrix ingestion, the column-net model and vertex streams.

mod mtx;
mod stream;
mod synth;

pub use mtx::{parse_matrix, SparseMatrixPattern};
pub use stream::{seeded_rng, stream_order, StreamFile, StreamHeader, HEADER_LEN, MAGIC, VERSION};
pub use synth::{synthetic_pattern, SyntheticSpec};

use std::path::Path;

use crate::{Hypergraph, NetId, Result};

/// Column-net hypergraph: one vertex per row, one net per column, vertex
/// `i` a pin of net `j` iff `(i, j)` is a nonzero.
pub fn column_net(m: &SparseMatrixPattern) -> Hypergraph {
    let mut lists: Vec<Vec<NetId>> = vec![Vec::new(); m.rows];
    for &(r, c) in &m.nonzeros {
        lists[r as usize].push(c);
    }
    for l in &mut lists {
        l.sort_unstable();
        l.dedup();
    }
    Hypergraph::from_vertex_nets(m.cols, &lists).expect("pattern coordinates are in range")
}

pub fn read_matrix_path(path: impl AsRef<Path>) -> Result<SparseMatrixPattern> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_net_by_construction() {
        let m = SparseMatrixPattern::from_coordinates(3, 3, [(0, 0), (0, 1), (1, 1), (2, 2)]).unwrap();
        let hg = column_net(&m);
        assert_eq!(hg.pins(0), &[0]);
        assert_eq!(hg.pins(1), &[0, 1]);
        assert_eq!(hg.pins(2), &[2]);
        assert_eq!(hg.nets(0), &[0, 1]);
        assert_eq!(hg.num_pins(), m.nnz());
    }

    #[test]
    fn diagonal_gives_singletons() {
        let m = SparseMatrixPattern::from_coordinates(5, 5, (0..5).map(|i| (i, i))).unwrap();
        let hg = column_net(&m);
        assert_eq!(hg.num_nets(), 5);
        assert!((0..5).all(|n| hg.pins(n).len() == 1));
    }

    #[test]
    fn empty_matrix_gives_empty_hypergraph() {
        let m = parse_matrix("%%MatrixMarket matrix coordinate pattern general\n0 0 0\n").unwrap();
        let hg = column_net(&m);
        assert_eq!((hg.num_vertices(), hg.num_nets(), hg.num_pins()), (0, 0, 0));
    }

    #[test]
    fn rectangular_patterns_are_fine() {
        let m = SparseMatrixPattern::from_coordinates(2, 4, [(0, 3), (1, 0), (1, 3)]).unwrap();
        let hg = column_net(&m);
        assert_eq!(hg.num_vertices(), 2);
        assert_eq!(hg.num_nets(), 4);
        assert_eq!(hg.pins(3), &[0, 1]);
    }

    #[test]
    fn pins_are_conserved_through_the_stream() {
        let src = "%%MatrixMarket matrix coordinate real symmetric\n4 4 4\n1 1 1\n2 1 1\n3 2 1\n4 4 1\n";
        let m = parse_matrix(src).unwrap();
        assert_eq!(m.nnz(), 6);
        let s = stream_order(&column_net(&m), 11);
        assert_eq!(s.header.pins, 6);
        let total: usize = s.elements.iter().map(|e| e.nets.len()).sum();
        assert_eq!(total, 6);
    }
}
