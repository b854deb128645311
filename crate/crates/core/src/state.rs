//! Part weights, the part vector and the dynamic balance law.

use crate::{Error, PartId, Result, VertexId, UNASSIGNED};

/// Slack in force after `assigned` vertices have been placed:
/// `max(1, floor(beta * assigned / parts))`.
pub fn dynamic_slack(assigned: u64, parts: u32, beta: f64) -> u64 {
    let s = (beta * assigned as f64 / parts as f64).floor();
    if s >= 1.0 {
        s as u64
    } else {
        1
    }
}

/// Balance bookkeeping for one streaming run.
///
/// Parts are 0-based. The slack is evaluated with the number of vertices
/// placed before the current one; a vertex temporarily lifted out by the
/// refinement pass still counts toward it.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionState {
    k: u32,
    beta: f64,
    weights: Vec<u64>,
    part: Vec<PartId>,
    p_min: PartId,
    p_max: PartId,
    assigned: u64,
    lifted: u64,
}

/// Eligibility test frozen for one placement decision.
#[derive(Debug, Clone, Copy)]
pub struct Gate {
    min_weight: u64,
    slack: u64,
    p_min: PartId,
    balanced: bool,
}

impl Gate {
    #[inline]
    pub fn admits(&self, p: PartId, weight: u64) -> bool {
        weight - self.min_weight < self.slack && (self.balanced || p == self.p_min)
    }

    pub fn slack(&self) -> u64 {
        self.slack
    }
}

impl PartitionState {
    pub fn new(k: u32, beta: f64) -> Result<Self> {
        Self::with_capacity(k, beta, 0)
    }

    pub fn with_capacity(k: u32, beta: f64, vertices: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("part count must be at least 1".into()));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::Config(format!("imbalance ratio must be finite and >= 0, got {beta}")));
        }
        Ok(PartitionState {
            k,
            beta,
            weights: vec![0; k as usize],
            part: vec![UNASSIGNED; vertices],
            p_min: 0,
            p_max: 0,
            assigned: 0,
            lifted: 0,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn p_min(&self) -> PartId {
        self.p_min
    }

    /// Number of vertices currently placed.
    pub fn assigned(&self) -> u64 {
        self.assigned
    }

    pub fn part_of(&self, v: VertexId) -> Option<PartId> {
        match self.part.get(v as usize) {
            Some(&p) if p != UNASSIGNED => Some(p),
            _ => None,
        }
    }

    /// Raw part vector; unplaced vertices hold [`UNASSIGNED`].
    pub fn part_vector(&self) -> &[PartId] {
        &self.part
    }

    pub fn into_part_vector(self) -> Vec<PartId> {
        self.part
    }

    pub fn slack(&self) -> u64 {
        dynamic_slack(self.assigned + self.lifted, self.k, self.beta)
    }

    pub fn gate(&self) -> Gate {
        let min_weight = self.weights[self.p_min as usize];
        let slack = self.slack();
        Gate {
            min_weight,
            slack,
            p_min: self.p_min,
            balanced: self.weights[self.p_max as usize] - min_weight <= slack,
        }
    }

    /// `weights[p] - weights[p_min] < slack`. While a lifted vertex has left
    /// the partition over-spread, only the least-loaded part qualifies.
    pub fn eligible(&self, p: PartId) -> bool {
        self.gate().admits(p, self.weights[p as usize])
    }

    /// Lowest-id eligible part. Always exists since `p_min` is eligible.
    pub fn lowest_eligible(&self) -> PartId {
        let gate = self.gate();
        (0..self.k)
            .find(|&p| gate.admits(p, self.weights[p as usize]))
            .unwrap_or(self.p_min)
    }

    /// Places `v` into `p`. The caller must have checked eligibility.
    pub fn assign(&mut self, v: VertexId, p: PartId) {
        debug_assert!(p < self.k, "part {p} out of range");
        debug_assert!(self.eligible(p), "part {p} is not eligible (weights {:?})", self.weights);
        let vi = v as usize;
        if vi >= self.part.len() {
            self.part.resize(vi + 1, UNASSIGNED);
        }
        debug_assert_eq!(self.part[vi], UNASSIGNED, "vertex {v} assigned twice");
        self.part[vi] = p;
        self.weights[p as usize] += 1;
        self.assigned += 1;
        self.lifted = self.lifted.saturating_sub(1);
        if p == self.p_min {
            self.p_min = argmin(&self.weights);
        }
        if self.weights[p as usize] > self.weights[self.p_max as usize] {
            self.p_max = p;
        }
    }

    /// Lifts `v` out of its part so it can be placed again.
    pub fn unassign(&mut self, v: VertexId) -> Result<PartId> {
        let p = self
            .part_of(v)
            .ok_or_else(|| Error::Invariant(format!("vertex {v} is not assigned")))?;
        self.part[v as usize] = UNASSIGNED;
        self.weights[p as usize] -= 1;
        self.assigned -= 1;
        self.lifted += 1;
        if self.weights[p as usize] < self.weights[self.p_min as usize] {
            self.p_min = p;
        }
        if p == self.p_max {
            self.p_max = argmax(&self.weights);
        }
        Ok(p)
    }

    /// `max_k weights[k] - min_k weights[k]`.
    pub fn imbalance(&self) -> u64 {
        self.weights[self.p_max as usize] - self.weights[self.p_min as usize]
    }

    pub fn empty_parts(&self) -> usize {
        self.weights.iter().filter(|&&w| w == 0).count()
    }
}

fn argmin(w: &[u64]) -> PartId {
    let mut best = 0;
    for (i, &x) in w.iter().enumerate() {
        if x < w[best] {
            best = i;
        }
    }
    best as PartId
}

fn argmax(w: &[u64]) -> PartId {
    let mut best = 0;
    for (i, &x) in w.iter().enumerate() {
        if x > w[best] {
            best = i;
        }
    }
    best as PartId
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state_with(weights: &[u64], beta: f64) -> PartitionState {
        let mut s = PartitionState::new(weights.len() as u32, beta).unwrap();
        let mut v = 0;
        // fill round-robin under a huge slack so any target is reachable
        let mut remaining = weights.to_vec();
        while remaining.iter().any(|&w| w > 0) {
            for (p, left) in remaining.iter_mut().enumerate() {
                if *left > 0 {
                    s.assign_unchecked(v, p as PartId);
                    *left -= 1;
                    v += 1;
                }
            }
        }
        s
    }

    impl PartitionState {
        fn assign_unchecked(&mut self, v: VertexId, p: PartId) {
            let beta = self.beta;
            self.beta = f64::MAX;
            self.assign(v, p);
            self.beta = beta;
        }
    }

    #[test]
    fn slack_examples() {
        assert_eq!(dynamic_slack(0, 256, 0.1), 1);
        assert_eq!(dynamic_slack(25_600, 256, 0.1), 10);
        assert_eq!(dynamic_slack(2_559, 256, 0.1), 1);
        assert_eq!(dynamic_slack(5_120, 256, 0.1), 2);
        assert_eq!(dynamic_slack(1_000, 2, 0.0), 1);
    }

    #[test]
    fn eligibility_examples() {
        // slack 2 requires beta * i / K in [2, 3): 8 vertices over 2 parts with beta 0.5
        let s = state_with(&[5, 3], 0.5);
        assert_eq!(s.slack(), 2);
        assert!(!s.eligible(0));
        assert!(s.eligible(1));
        assert_eq!(s.p_min(), 1);
        assert!(s.eligible(s.p_min()));
    }

    #[test]
    fn first_assignment() {
        let mut s = PartitionState::new(2, 0.1).unwrap();
        s.assign(0, 1);
        assert_eq!(s.weights(), &[0, 1]);
        assert_eq!(s.part_of(0), Some(1));
        assert_eq!(s.p_min(), 0);
        assert_eq!(s.assigned(), 1);
    }

    #[test]
    fn imbalance_examples() {
        assert_eq!(state_with(&[4, 4, 4], 0.1).imbalance(), 0);
        assert_eq!(state_with(&[5, 3, 4], 0.1).imbalance(), 2);
        assert_eq!(state_with(&[7], 0.1).imbalance(), 0);
    }

    #[test]
    fn lift_and_replace_round_trip() {
        let mut s = state_with(&[3, 2, 2], 0.1);
        let before = s.clone();
        let p = s.unassign(0).unwrap();
        assert_eq!(p, 0);
        assert_eq!(s.assigned(), 6);
        assert_eq!(s.slack(), before.slack());
        assert!(s.eligible(0));
        s.assign(0, 0);
        assert_eq!(s, before);
    }

    #[test]
    fn lifting_from_unique_minimum_pins_the_vertex() {
        // weights [2,3,5] with slack 3: lifting from part 0 spreads to 4 > 3
        let mut s = state_with(&[2, 3, 5], 0.9);
        assert_eq!(s.slack(), 3);
        s.unassign(0).unwrap();
        assert_eq!(s.imbalance(), 4);
        assert!(s.eligible(0));
        assert!(!s.eligible(1));
        assert_eq!(s.lowest_eligible(), 0);
    }

    #[test]
    fn unassign_unknown_vertex_fails() {
        let mut s = PartitionState::new(2, 0.1).unwrap();
        assert!(s.unassign(5).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PartitionState::new(0, 0.1).is_err());
        assert!(PartitionState::new(2, -0.1).is_err());
        assert!(PartitionState::new(2, f64::NAN).is_err());
    }
}
