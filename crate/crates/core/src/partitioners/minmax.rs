use crate::state::PartitionState;
use crate::{NetId, PartId, StreamElement};

/// Part-to-net connectivity (`p2n`): one growable net bitset per part.
#[derive(Debug, Clone)]
pub struct PartToNet {
    rows: Vec<Vec<u64>>,
    entries: u64,
}

impl PartToNet {
    pub fn new(k: u32) -> Self {
        PartToNet {
            rows: vec![Vec::new(); k as usize],
            entries: 0,
        }
    }

    #[inline]
    pub fn contains(&self, p: PartId, n: NetId) -> bool {
        let n = n as usize;
        self.rows[p as usize]
            .get(n >> 6)
            .is_some_and(|w| w & (1 << (n & 63)) != 0)
    }

    pub fn insert(&mut self, p: PartId, n: NetId) -> bool {
        let n = n as usize;
        let row = &mut self.rows[p as usize];
        if row.len() <= n >> 6 {
            row.resize((n >> 6) + 1, 0);
        }
        let bit = 1u64 << (n & 63);
        let fresh = row[n >> 6] & bit == 0;
        row[n >> 6] |= bit;
        if fresh {
            self.entries += 1;
        }
        fresh
    }

    /// `|p2n[p] ∩ nets|`.
    #[inline]
    pub fn overlap(&self, p: PartId, nets: &[NetId]) -> u32 {
        let row = &self.rows[p as usize];
        nets.iter()
            .filter(|&&n| {
                let n = n as usize;
                row.get(n >> 6).is_some_and(|w| w & (1 << (n & 63)) != 0)
            })
            .count() as u32
    }

    /// 64-bit words allocated across all rows.
    pub fn words(&self) -> u64 {
        self.rows.iter().map(|r| r.len() as u64).sum()
    }

    /// `Σ_p |p2n[p]|`.
    pub fn entries(&self) -> u64 {
        self.entries
    }
}

/// Scans every eligible part and takes the one sharing the most nets with
/// the vertex, lowest id on ties.
pub fn step_minmax(state: &mut PartitionState, p2n: &mut PartToNet, elem: &StreamElement) -> PartId {
    let p = if elem.nets.is_empty() {
        state.p_min()
    } else {
        let gate = state.gate();
        let w = state.weights();
        let mut saved: i64 = -1;
        let mut best = state.p_min();
        for i in 0..state.k() {
            if gate.admits(i, w[i as usize]) {
                let s = p2n.overlap(i, &elem.nets) as i64;
                if s > saved {
                    saved = s;
                    best = i;
                }
            }
        }
        best
    };
    state.assign(elem.vertex, p);
    for &n in &elem.nets {
        p2n.insert(p, n);
    }
    p
}
