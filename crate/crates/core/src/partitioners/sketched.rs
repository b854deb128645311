use crate::sketch::{encode_key, BloomFilter, MinHashFamily};
use crate::state::PartitionState;
use crate::{PartId, StreamElement};

/// Bloom-filter placement. There is no way to enumerate the parts a net
/// touches, so every eligible part is probed.
pub fn step_minmax_bf(state: &mut PartitionState, bf: &mut BloomFilter, elem: &StreamElement) -> PartId {
    let k = state.k();
    let p = if elem.nets.is_empty() {
        state.p_min()
    } else {
        let gate = state.gate();
        let w = state.weights();
        let mut saved: i64 = -1;
        let mut best = state.p_min();
        for i in 0..k {
            if !gate.admits(i, w[i as usize]) {
                continue;
            }
            let s = elem
                .nets
                .iter()
                .filter(|&&n| bf.query(encode_key(n, i, k)))
                .count() as i64;
            if s > saved {
                saved = s;
                best = i;
            }
        }
        best
    };
    state.assign(elem.vertex, p);
    for &n in &elem.nets {
        bf.insert(encode_key(n, p, k));
    }
    p
}

/// MinHash placement: the hashed part, or the next eligible part after it.
pub fn step_minmax_mh(state: &mut PartitionState, fam: &MinHashFamily, elem: &StreamElement) -> PartId {
    let k = state.k();
    let p = match fam.part(&elem.nets, k) {
        None => state.p_min(),
        Some(start) => {
            let gate = state.gate();
            let w = state.weights();
            (0..k)
                .map(|off| (start + off) % k)
                .find(|&p| gate.admits(p, w[p as usize]))
                .unwrap_or(state.p_min())
        }
    };
    state.assign(elem.vertex, p);
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_filter_takes_lowest_eligible() {
        let mut state = PartitionState::new(4, 0.1).unwrap();
        let mut bf = BloomFilter::new(1 << 12, 4).unwrap();
        assert_eq!(step_minmax_bf(&mut state, &mut bf, &StreamElement::new(0, [3])), 0);
        assert!(bf.query(encode_key(3, 0, 4)));
    }

    #[test]
    fn counts_positive_queries() {
        let mut state = PartitionState::new(2, 0.1).unwrap();
        let mut bf = BloomFilter::new(1 << 12, 4).unwrap();
        bf.insert(encode_key(1, 1, 2));
        bf.insert(encode_key(2, 1, 2));
        assert_eq!(step_minmax_bf(&mut state, &mut bf, &StreamElement::new(0, [1, 2])), 1);
    }

    #[test]
    fn saturated_filter_ties() {
        let mut state = PartitionState::new(3, 0.1).unwrap();
        let mut bf = BloomFilter::new(4, 4).unwrap();
        let mut key = 0;
        while bf.ones() < 4 {
            bf.insert(key);
            key += 1;
        }
        state.assign(100, 0);
        // part 0 is blocked; 1 and 2 tie at full saving
        assert_eq!(step_minmax_bf(&mut state, &mut bf, &StreamElement::new(0, [8, 9])), 1);
    }

    #[test]
    fn minhash_probe() {
        let fam = MinHashFamily::from_coefficients(97, vec![(3, 5)]).unwrap();
        // h(10) = 35, 35 mod 8 = 3
        let mut state = PartitionState::new(8, 0.1).unwrap();
        assert_eq!(step_minmax_mh(&mut state, &fam, &StreamElement::new(0, [10, 20])), 3);
        // part 3 now one ahead with slack 1, so probing moves on to 4
        assert_eq!(step_minmax_mh(&mut state, &fam, &StreamElement::new(1, [10, 20])), 4);
    }

    #[test]
    fn minhash_identical_lists_share_a_part() {
        let fam = MinHashFamily::new(4, crate::sketch::MERSENNE_31, 3).unwrap();
        let mut state = PartitionState::new(1024, 0.1).unwrap();
        let a = step_minmax_mh(&mut state, &fam, &StreamElement::new(0, [4, 8, 15]));
        let mut state = PartitionState::new(1024, 0.1).unwrap();
        let b = step_minmax_mh(&mut state, &fam, &StreamElement::new(1, [15, 8, 4]));
        assert_eq!(a, b);
    }

    #[test]
    fn minhash_degree_zero_uses_p_min() {
        let fam = MinHashFamily::new(2, 97, 3).unwrap();
        let mut state = PartitionState::new(3, 0.1).unwrap();
        state.assign(9, 0);
        assert_eq!(step_minmax_mh(&mut state, &fam, &StreamElement::new(0, [])), 1);
    }
}
