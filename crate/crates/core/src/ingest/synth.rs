//! Seeded synthetic sparse patterns with heavy-tailed row degrees and
//! planted column clusters.

use rand::Rng;

use super::{seeded_rng, SparseMatrixPattern};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    /// Rows, i.e. vertices of the column-net hypergraph.
    pub vertices: usize,
    /// Columns, i.e. nets.
    pub nets: usize,
    pub mean_degree: f64,
    /// Rows and columns are split into this many contiguous clusters.
    pub clusters: usize,
    /// Probability that a row's nonzero lands in its own cluster's columns.
    pub locality: f64,
    /// Pareto tail exponent of the row degrees; must exceed 2.
    pub exponent: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            vertices: 10_000,
            nets: 10_000,
            mean_degree: 10.0,
            clusters: 64,
            locality: 0.8,
            exponent: 2.5,
            seed: 0,
        }
    }
}

pub fn synthetic_pattern(spec: &SyntheticSpec) -> Result<SparseMatrixPattern> {
    if spec.vertices == 0 || spec.nets == 0 {
        return Err(Error::Config("synthetic pattern needs at least one row and column".into()));
    }
    if spec.clusters == 0 || spec.clusters > spec.nets || spec.clusters > spec.vertices {
        return Err(Error::Config("cluster count must be in 1..=min(rows, cols)".into()));
    }
    if spec.exponent.is_nan() || spec.exponent <= 2.0 || spec.mean_degree.is_nan() || spec.mean_degree < 1.0 || !(0.0..=1.0).contains(&spec.locality) {
        return Err(Error::Config(
            "need exponent > 2, mean degree >= 1 and locality in [0, 1]".into(),
        ));
    }
    let mut rng = seeded_rng(spec.seed);
    let alpha = spec.exponent;
    let d_min = spec.mean_degree * (alpha - 2.0) / (alpha - 1.0);
    let cap = spec.nets.min((spec.mean_degree * 50.0) as usize).max(1);

    let mut coords = Vec::with_capacity((spec.vertices as f64 * spec.mean_degree) as usize);
    let mut row = Vec::new();
    for v in 0..spec.vertices {
        let u: f64 = rng.random();
        let d = (d_min * (1.0 - u).powf(-1.0 / (alpha - 1.0))).round();
        let d = (d as usize).clamp(1, cap);

        let c = v * spec.clusters / spec.vertices;
        let lo = c * spec.nets / spec.clusters;
        let hi = (c + 1) * spec.nets / spec.clusters;
        row.clear();
        let mut attempts = 0;
        while row.len() < d && attempts < 20 * d {
            attempts += 1;
            let n = if rng.random::<f64>() < spec.locality {
                rng.random_range(lo..hi)
            } else {
                rng.random_range(0..spec.nets)
            };
            if !row.contains(&n) {
                row.push(n);
            }
        }
        coords.extend(row.iter().map(|&n| (v as u32, n as u32)));
    }
    SparseMatrixPattern::from_coordinates(spec.vertices, spec.nets, coords)
}
