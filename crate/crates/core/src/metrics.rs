//! From-scratch partition quality metrics.
//!
//! Everything here recomputes from the pin structure and a part vector and
//! shares no code with the incremental bookkeeping it is used to check.

use serde::Serialize;

use crate::{Error, Hypergraph, NetId, PartId, Result, VertexId, UNASSIGNED};

/// Connectivity−1 cutsize `Σ_n (λ_n − 1)`, nets without pins contributing 0.
pub fn connectivity_cutsize(hg: &Hypergraph, part: &[PartId]) -> Result<u64> {
    let mut cut = 0u64;
    let mut scratch = Vec::new();
    for n in 0..hg.num_nets() as NetId {
        let lambda = net_lambda(hg, part, n, &mut scratch)?;
        cut += lambda.saturating_sub(1) as u64;
    }
    Ok(cut)
}

fn net_lambda(hg: &Hypergraph, part: &[PartId], n: NetId, scratch: &mut Vec<PartId>) -> Result<usize> {
    scratch.clear();
    for &v in hg.pins(n) {
        let p = match part.get(v as usize) {
            Some(&p) if p != UNASSIGNED => p,
            _ => return Err(Error::Input(format!("vertex {v} (pin of net {n}) has no part"))),
        };
        scratch.push(p);
    }
    scratch.sort_unstable();
    scratch.dedup();
    Ok(scratch.len())
}

/// Detailed evaluation of a complete part vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub cut: u64,
    /// `lambda_histogram[l]` = number of nets with connectivity `l`.
    pub lambda_histogram: Vec<u64>,
    pub imbalance: u64,
    pub weights: Vec<u64>,
    pub boundary_vertices: u64,
}

/// Evaluates a complete K-way part vector.
pub fn evaluate(hg: &Hypergraph, part: &[PartId], k: u32) -> Result<Evaluation> {
    if part.len() != hg.num_vertices() {
        return Err(Error::Input(format!(
            "part vector has {} entries, hypergraph has {} vertices",
            part.len(),
            hg.num_vertices()
        )));
    }
    if let Some((v, &p)) = part.iter().enumerate().find(|(_, &p)| p >= k) {
        return Err(Error::Input(format!("vertex {v} has part id {p} >= K = {k}")));
    }
    let mut weights = vec![0u64; k as usize];
    for &p in part {
        weights[p as usize] += 1;
    }
    let mut hist = vec![0u64; 1];
    let mut cut = 0u64;
    let mut boundary = vec![false; hg.num_vertices()];
    let mut scratch = Vec::new();
    for n in 0..hg.num_nets() as NetId {
        let lambda = net_lambda(hg, part, n, &mut scratch)?;
        if hist.len() <= lambda {
            hist.resize(lambda + 1, 0);
        }
        hist[lambda] += 1;
        cut += lambda.saturating_sub(1) as u64;
        if lambda > 1 {
            for &v in hg.pins(n) {
                boundary[v as usize] = true;
            }
        }
    }
    let max = weights.iter().copied().max().unwrap_or(0);
    let min = weights.iter().copied().min().unwrap_or(0);
    Ok(Evaluation {
        cut,
        lambda_histogram: hist,
        imbalance: max - min,
        weights,
        boundary_vertices: boundary.iter().filter(|&&b| b).count() as u64,
    })
}

/// Vertices incident to at least one cut net.
pub fn boundary_vertices(hg: &Hypergraph, part: &[PartId]) -> Result<Vec<VertexId>> {
    let mut boundary = vec![false; hg.num_vertices()];
    let mut scratch = Vec::new();
    for n in 0..hg.num_nets() as NetId {
        if net_lambda(hg, part, n, &mut scratch)? > 1 {
            for &v in hg.pins(n) {
                boundary[v as usize] = true;
            }
        }
    }
    Ok((0..hg.num_vertices() as VertexId)
        .filter(|&v| boundary[v as usize])
        .collect())
}
