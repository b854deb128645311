//! Net-to-part connectivity (`n2p`), optionally with per-part pin counts.
//!
//! Each seen net keeps the list of parts it touches. In counted mode every
//! entry additionally carries `Λ(n, p)`, the number of the net's placed pins
//! in part `p`, which is what refinement needs to detect leave gains.
//!
//! The structure also tracks the connectivity−1 cut incrementally:
//! adding a part to a net that already touches one increases the cut by one,
//! dropping a part from a net that still touches another decreases it.

use crate::{Error, NetId, PartId, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectivityMode {
    SetOnly,
    Counted,
}

#[derive(Debug, Clone)]
pub struct NetConnectivity {
    parts: Vec<Vec<PartId>>,
    // parallel to `parts` in counted mode
    counts: Option<Vec<Vec<u32>>>,
    seen: Vec<bool>,
    nets_seen: u64,
    entries: u64,
    cut: u64,
}

impl NetConnectivity {
    pub fn new(mode: ConnectivityMode) -> Self {
        Self::with_nets(mode, 0)
    }

    pub fn with_nets(mode: ConnectivityMode, nets: usize) -> Self {
        NetConnectivity {
            parts: vec![Vec::new(); nets],
            counts: match mode {
                ConnectivityMode::SetOnly => None,
                ConnectivityMode::Counted => Some(vec![Vec::new(); nets]),
            },
            seen: vec![false; nets],
            nets_seen: 0,
            entries: 0,
            cut: 0,
        }
    }

    pub fn mode(&self) -> ConnectivityMode {
        if self.counts.is_some() {
            ConnectivityMode::Counted
        } else {
            ConnectivityMode::SetOnly
        }
    }

    /// Registers `n` as seen; returns true the first time.
    pub fn touch(&mut self, n: NetId) -> bool {
        let i = n as usize;
        if i >= self.seen.len() {
            self.seen.resize(i + 1, false);
            self.parts.resize_with(i + 1, Vec::new);
            if let Some(c) = self.counts.as_mut() {
                c.resize_with(i + 1, Vec::new);
            }
        }
        if self.seen[i] {
            false
        } else {
            self.seen[i] = true;
            self.nets_seen += 1;
            true
        }
    }

    /// `parts[n]`; empty for unseen nets.
    #[inline]
    pub fn parts(&self, n: NetId) -> &[PartId] {
        self.parts.get(n as usize).map_or(&[], Vec::as_slice)
    }

    #[inline]
    pub fn lambda(&self, n: NetId) -> usize {
        self.parts(n).len()
    }

    /// `Λ(n, p)`; `None` in set-only mode.
    pub fn pin_count(&self, n: NetId, p: PartId) -> Option<u32> {
        let counts = self.counts.as_ref()?;
        let ps = self.parts(n);
        Some(match ps.iter().position(|&q| q == p) {
            Some(j) => counts[n as usize][j],
            None => 0,
        })
    }

    /// Per-part pin counts of `n`, parallel to [`parts`](Self::parts).
    pub fn counts(&self, n: NetId) -> Option<&[u32]> {
        let counts = self.counts.as_ref()?;
        Some(counts.get(n as usize).map_or(&[], Vec::as_slice))
    }

    /// Records a pin of `n` placed in `p`.
    pub fn add_pin(&mut self, n: NetId, p: PartId) {
        self.touch(n);
        let i = n as usize;
        let ps = &mut self.parts[i];
        match ps.iter().position(|&q| q == p) {
            Some(j) => {
                if let Some(c) = self.counts.as_mut() {
                    c[i][j] += 1;
                }
            }
            None => {
                if !ps.is_empty() {
                    self.cut += 1;
                }
                ps.push(p);
                self.entries += 1;
                if let Some(c) = self.counts.as_mut() {
                    c[i].push(1);
                }
            }
        }
    }

    /// Removes one pin of `n` from `p` (counted mode only).
    pub fn remove_pin(&mut self, n: NetId, p: PartId) -> Result<()> {
        let counts = self
            .counts
            .as_mut()
            .ok_or_else(|| Error::Invariant("pin removal needs counted connectivity".into()))?;
        let i = n as usize;
        let j = self
            .parts
            .get(i)
            .and_then(|ps| ps.iter().position(|&q| q == p))
            .ok_or_else(|| Error::Invariant(format!("net {n} has no pin in part {p}")))?;
        counts[i][j] -= 1;
        if counts[i][j] == 0 {
            counts[i].swap_remove(j);
            self.parts[i].swap_remove(j);
            self.entries -= 1;
            if !self.parts[i].is_empty() {
                self.cut -= 1;
            }
        }
        Ok(())
    }

    /// `Σ_n |parts[n]|`.
    pub fn entry_count(&self) -> u64 {
        self.entries
    }

    pub fn nets_seen(&self) -> u64 {
        self.nets_seen
    }

    /// Incrementally tracked `Σ_n max(λ_n − 1, 0)`.
    pub fn cut(&self) -> u64 {
        self.cut
    }

    /// Structural memory: one integer per entry, two in counted mode.
    pub fn aux_integers(&self) -> u64 {
        match self.mode() {
            ConnectivityMode::SetOnly => self.entries,
            ConnectivityMode::Counted => 2 * self.entries,
        }
    }
}

/// `Σ_n |parts[n]|` for the given connectivity.
pub fn entry_count(conn: &NetConnectivity) -> u64 {
    conn.entry_count()
}
