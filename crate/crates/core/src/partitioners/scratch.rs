use crate::connectivity::NetConnectivity;
use crate::state::PartitionState;
use crate::{NetId, PartId};

/// Read access to per-net part lists.
pub trait PartLists {
    fn part_list(&self, n: NetId) -> &[PartId];
}

impl PartLists for NetConnectivity {
    #[inline]
    fn part_list(&self, n: NetId) -> &[PartId] {
        self.parts(n)
    }
}

/// The four K-length arrays used to collect the parts connected to the
/// current vertex's nets without ever resetting them.
///
/// `mark` holds a per-call stamp rather than the vertex id: refinement
/// revisits vertices, so a vertex id alone cannot tell two calls apart.
#[derive(Debug, Clone)]
pub struct ActivePartScratch {
    save: Vec<u32>,
    mark: Vec<u64>,
    pids: Vec<PartId>,
    indx: Vec<u32>,
    active: usize,
    stamp: u64,
}

impl ActivePartScratch {
    pub fn new(k: u32) -> Self {
        let k = k as usize;
        ActivePartScratch {
            save: vec![0; k],
            mark: vec![0; k],
            pids: vec![0; k],
            indx: vec![0; k],
            active: 0,
            stamp: 0,
        }
    }

    /// Starts a new vertex; O(1).
    pub fn begin(&mut self) {
        self.stamp += 1;
        self.active = 0;
    }

    /// Counts one net of the current vertex that already touches `p`.
    #[inline]
    pub fn hit(&mut self, p: PartId) {
        let pi = p as usize;
        if self.mark[pi] != self.stamp {
            self.mark[pi] = self.stamp;
            self.pids[self.active] = p;
            self.save[self.active] = 1;
            self.indx[pi] = self.active as u32;
            self.active += 1;
        } else {
            self.save[self.indx[pi] as usize] += 1;
        }
    }

    /// Collects the active parts of `nets`.
    pub fn gather<L: PartLists + ?Sized>(&mut self, lists: &L, nets: &[NetId]) {
        self.begin();
        for &n in nets {
            for &p in lists.part_list(n) {
                self.hit(p);
            }
        }
    }

    pub fn active(&self) -> usize {
        self.active
    }

    /// `(part, saving)` for every active part, in discovery order.
    pub fn active_parts(&self) -> impl Iterator<Item = (PartId, u32)> + '_ {
        self.pids[..self.active]
            .iter()
            .copied()
            .zip(self.save[..self.active].iter().copied())
    }

    /// Eligible active part with the largest saving, lowest id on ties.
    pub fn best_eligible(&self, state: &PartitionState) -> Option<PartId> {
        let gate = state.gate();
        let w = state.weights();
        let mut best: Option<(u32, PartId)> = None;
        for (p, s) in self.active_parts() {
            if !gate.admits(p, w[p as usize]) {
                continue;
            }
            best = match best {
                Some((bs, bp)) if bs > s || (bs == s && bp < p) => Some((bs, bp)),
                _ => Some((s, p)),
            };
        }
        best.map(|(_, p)| p)
    }

    /// Number of `u32`/`u64` slots held.
    pub fn aux_integers(&self) -> u64 {
        4 * self.save.len() as u64
    }
}

/// Net-to-part placement rule: the eligible part sharing the most nets with
/// `nets` (lowest id on ties); the lowest-id eligible part when no eligible
/// part shares any; `p_min` for a vertex without nets.
pub fn choose_by_connectivity<L: PartLists + ?Sized>(
    state: &PartitionState,
    lists: &L,
    scratch: &mut ActivePartScratch,
    nets: &[NetId],
) -> PartId {
    if nets.is_empty() {
        return state.p_min();
    }
    scratch.gather(lists, nets);
    scratch
        .best_eligible(state)
        .unwrap_or_else(|| state.lowest_eligible())
}
