use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::state::PartitionState;
use crate::{PartId, StreamElement};

/// Uniform draw over the parts, redrawn until the part is eligible.
pub fn step_random(state: &mut PartitionState, rng: &mut ChaCha8Rng, elem: &StreamElement) -> PartId {
    let gate = state.gate();
    let k = state.k();
    let p = loop {
        let p = rng.random_range(0..k);
        if gate.admits(p, state.weights()[p as usize]) {
            break p;
        }
    };
    state.assign(elem.vertex, p);
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::seeded_rng;

    #[test]
    fn forced_part_when_only_one_is_eligible() {
        let mut state = PartitionState::new(2, 0.1).unwrap();
        state.assign(0, 0);
        let mut rng = seeded_rng(1);
        for seed in 0..20 {
            let mut s = state.clone();
            let mut r = seeded_rng(seed);
            assert_eq!(step_random(&mut s, &mut r, &StreamElement::new(1, [])), 1);
        }
        let _ = step_random(&mut state, &mut rng, &StreamElement::new(1, [0]));
    }

    #[test]
    fn seed_determines_sequence() {
        let run = |seed| {
            let mut state = PartitionState::new(8, 0.1).unwrap();
            let mut rng = seeded_rng(seed);
            (0..200)
                .map(|v| step_random(&mut state, &mut rng, &StreamElement::new(v, [])))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }
}
