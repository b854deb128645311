use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::scratch::{choose_by_connectivity, ActivePartScratch, PartLists};
use crate::connectivity::NetConnectivity;
use crate::state::PartitionState;
use crate::{NetId, PartId, StreamElement};

/// Net-to-part placement: only parts reachable through the vertex's nets
/// are examined.
pub fn step_minmax_n2p(
    state: &mut PartitionState,
    conn: &mut NetConnectivity,
    scratch: &mut ActivePartScratch,
    elem: &StreamElement,
) -> PartId {
    for &n in &elem.nets {
        conn.touch(n);
    }
    let p = choose_by_connectivity(state, conn, scratch, &elem.nets);
    state.assign(elem.vertex, p);
    for &n in &elem.nets {
        conn.add_pin(n, p);
    }
    p
}

/// Net-to-part lists truncated to `ell` slots per net.
#[derive(Debug, Clone)]
pub struct LimitedConnectivity {
    ell: usize,
    slots: Vec<PartId>,
    lens: Vec<u32>,
    seen: Vec<bool>,
    nets_seen: u64,
    entries: u64,
}

impl LimitedConnectivity {
    /// `ell` is clamped to `k`, since a net can never touch more than `k` parts.
    pub fn new(ell: usize, k: u32) -> Self {
        assert!(ell >= 1, "ell must be at least 1");
        LimitedConnectivity {
            ell: ell.min(k as usize),
            slots: Vec::new(),
            lens: Vec::new(),
            seen: Vec::new(),
            nets_seen: 0,
            entries: 0,
        }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn touch(&mut self, n: NetId) {
        let i = n as usize;
        if i >= self.lens.len() {
            self.lens.resize(i + 1, 0);
            self.seen.resize(i + 1, false);
            self.slots.resize((i + 1) * self.ell, 0);
        }
        if !self.seen[i] {
            self.seen[i] = true;
            self.nets_seen += 1;
        }
    }

    pub fn parts(&self, n: NetId) -> &[PartId] {
        let i = n as usize;
        match self.lens.get(i) {
            Some(&len) => &self.slots[i * self.ell..i * self.ell + len as usize],
            None => &[],
        }
    }

    /// Adds `p` if there is room; otherwise overwrites a uniformly chosen
    /// slot, unless `p` is already present.
    pub fn update(&mut self, n: NetId, p: PartId, rng: &mut ChaCha8Rng) {
        self.touch(n);
        let i = n as usize;
        let base = i * self.ell;
        let len = self.lens[i] as usize;
        if self.slots[base..base + len].contains(&p) {
            return;
        }
        if len < self.ell {
            self.slots[base + len] = p;
            self.lens[i] += 1;
            self.entries += 1;
        } else {
            let idx = rng.random_range(0..self.ell);
            self.slots[base + idx] = p;
        }
    }

    pub fn entry_count(&self) -> u64 {
        self.entries
    }

    pub fn nets_seen(&self) -> u64 {
        self.nets_seen
    }

    /// Allocated slots, filled or not.
    pub fn slot_count(&self) -> u64 {
        self.slots.len() as u64
    }
}

impl PartLists for LimitedConnectivity {
    #[inline]
    fn part_list(&self, n: NetId) -> &[PartId] {
        self.parts(n)
    }
}

/// Net-to-part placement over lists capped at `ell` parts per net.
pub fn step_minmax_l(
    state: &mut PartitionState,
    conn: &mut LimitedConnectivity,
    scratch: &mut ActivePartScratch,
    elem: &StreamElement,
    rng: &mut ChaCha8Rng,
) -> PartId {
    for &n in &elem.nets {
        conn.touch(n);
    }
    let p = choose_by_connectivity(state, conn, scratch, &elem.nets);
    state.assign(elem.vertex, p);
    for &n in &elem.nets {
        conn.update(n, p, rng);
    }
    p
}
