use rand::Rng;

use crate::ingest::seeded_rng;
use crate::{Error, NetId, PartId, Result};

/// Default modulus, the Mersenne prime `2^31 - 1`.
pub const MERSENNE_31: u64 = (1 << 31) - 1;

const MAX_MODULUS: u64 = 1 << 40;

/// `k` universal hash functions `h_i(x) = (a_i x + b_i) mod q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinHashFamily {
    q: u64,
    coeffs: Vec<(u64, u64)>,
}

impl MinHashFamily {
    /// Draws `k` coefficient pairs uniformly from `[0, q)`.
    pub fn new(k: usize, q: u64, seed: u64) -> Result<Self> {
        check_modulus(q)?;
        if k == 0 {
            return Err(Error::Config("MinHash needs at least one hash function".into()));
        }
        let mut rng = seeded_rng(seed);
        let coeffs = (0..k)
            .map(|_| (rng.random_range(0..q), rng.random_range(0..q)))
            .collect();
        Ok(MinHashFamily { q, coeffs })
    }

    pub fn from_coefficients(q: u64, coeffs: Vec<(u64, u64)>) -> Result<Self> {
        check_modulus(q)?;
        if coeffs.is_empty() || coeffs.iter().any(|&(a, b)| a >= q || b >= q) {
            return Err(Error::Config("coefficients must be non-empty and below q".into()));
        }
        Ok(MinHashFamily { q, coeffs })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficients(&self) -> &[(u64, u64)] {
        &self.coeffs
    }

    #[inline]
    pub fn hash(&self, i: usize, x: u64) -> u64 {
        let (a, b) = self.coeffs[i];
        ((a as u128 * x as u128 + b as u128) % self.q as u128) as u64
    }

    /// `α_i = min_{n in nets} h_i(n)` for every function; `None` if `nets` is empty.
    pub fn signature(&self, nets: &[NetId]) -> Option<Vec<u64>> {
        if nets.is_empty() {
            return None;
        }
        Some(
            (0..self.coeffs.len())
                .map(|i| nets.iter().map(|&n| self.hash(i, n as u64)).min().unwrap())
                .collect(),
        )
    }

    /// `(Π α_i) mod parts`, reduced after every multiplication.
    /// `None` for an empty net list.
    pub fn part(&self, nets: &[NetId], parts: u32) -> Option<PartId> {
        let sig = self.signature(nets)?;
        let k = parts as u64;
        let mut acc = 1 % k;
        for alpha in sig {
            acc = acc * (alpha % k) % k;
        }
        Some(acc as PartId)
    }
}

/// Free-function form of [`MinHashFamily::part`].
pub fn minhash_part(nets: &[NetId], fam: &MinHashFamily, parts: u32) -> Option<PartId> {
    fam.part(nets, parts)
}

fn check_modulus(q: u64) -> Result<()> {
    if q > MAX_MODULUS {
        return Err(Error::Config(format!("modulus {q} exceeds 2^40")));
    }
    if !is_prime(q) {
        return Err(Error::Config(format!("modulus {q} is not prime")));
    }
    Ok(())
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_arithmetic() {
        let fam = MinHashFamily::from_coefficients(97, vec![(3, 5)]).unwrap();
        assert_eq!(fam.hash(0, 10), 35);
        assert_eq!(fam.hash(0, 20), 65);
        assert_eq!(fam.signature(&[10, 20]), Some(vec![35]));
        assert_eq!(fam.part(&[10, 20], 8), Some(3));
    }

    #[test]
    fn single_function_single_net() {
        let fam = MinHashFamily::new(1, MERSENNE_31, 4).unwrap();
        let n = 12_345;
        assert_eq!(fam.part(&[n], 64), Some((fam.hash(0, n as u64) % 64) as PartId));
    }

    #[test]
    fn deterministic_and_order_free() {
        let a = MinHashFamily::new(4, MERSENNE_31, 9).unwrap();
        let b = MinHashFamily::new(4, MERSENNE_31, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.part(&[1, 5, 9], 256), b.part(&[9, 1, 5], 256));
        assert_eq!(a.part(&[], 256), None);
    }

    #[test]
    fn modulus_checks() {
        assert!(MinHashFamily::new(2, 100, 0).is_err());
        assert!(MinHashFamily::new(2, 1, 0).is_err());
        assert!(MinHashFamily::new(0, 97, 0).is_err());
        assert!(MinHashFamily::from_coefficients(97, vec![(97, 0)]).is_err());
        assert!(is_prime(MERSENNE_31));
    }
}
