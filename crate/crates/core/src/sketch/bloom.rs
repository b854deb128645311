use crate::{Error, NetId, PartId, Result};

/// Fixed-size Bloom filter over 64-bit keys.
///
/// Bit positions come from double hashing, `g_i(x) = h_a(x) + i * h_b(x) mod m`,
/// with two independent 64-bit mixers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BloomFilter {
    words: Vec<u64>,
    m: u64,
    k: u32,
    inserted: u64,
}

/// Injective `(net, part)` encoding for parts below `parts`: `net * parts + part`.
#[inline]
pub fn encode_key(net: NetId, part: PartId, parts: u32) -> u64 {
    debug_assert!(part < parts);
    net as u64 * parts as u64 + part as u64
}

/// Analytic false-positive probability `(1 - e^{-kn/m})^k`.
pub fn bf_fpp(k: u32, n: u64, m: u64) -> f64 {
    assert!(m > 0, "bit count must be positive");
    if n == 0 {
        return 0.0;
    }
    let kf = k as f64;
    (1.0 - (-kf * n as f64 / m as f64).exp()).powf(kf)
}

#[inline]
fn mix_a(x: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn mix_b(x: u64) -> u64 {
    // murmur3 fmix64 on a differently salted input
    let mut z = x ^ 0xC2B2_AE3D_27D4_EB4F;
    z ^= z >> 33;
    z = z.wrapping_mul(0xFF51_AFD7_ED55_8CCD);
    z ^= z >> 33;
    z = z.wrapping_mul(0xC4CE_B9FE_1A85_EC53);
    z ^= z >> 33;
    z | 1
}

impl BloomFilter {
    pub fn new(m: u64, k: u32) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(Error::Config("Bloom filter needs m >= 1 bits and k >= 1 hashes".into()));
        }
        if (k as u64) > m {
            return Err(Error::Config(format!("Bloom filter with {m} bits cannot use {k} hashes")));
        }
        Ok(BloomFilter {
            words: vec![0; m.div_ceil(64) as usize],
            m,
            k,
            inserted: 0,
        })
    }

    pub fn bits(&self) -> u64 {
        self.m
    }

    pub fn hashes(&self) -> u32 {
        self.k
    }

    /// Number of insert calls so far, used for the analytic estimate.
    pub fn inserted(&self) -> u64 {
        self.inserted
    }

    pub fn words(&self) -> usize {
        self.words.len()
    }

    pub fn ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    #[inline]
    fn positions(&self, key: u64) -> impl Iterator<Item = u64> + '_ {
        let a = mix_a(key);
        let b = mix_b(key);
        (0..self.k as u64).map(move |i| a.wrapping_add(i.wrapping_mul(b)) % self.m)
    }

    pub fn insert(&mut self, key: u64) {
        let a = mix_a(key);
        let b = mix_b(key);
        for i in 0..self.k as u64 {
            let bit = a.wrapping_add(i.wrapping_mul(b)) % self.m;
            self.words[(bit >> 6) as usize] |= 1 << (bit & 63);
        }
        self.inserted += 1;
    }

    #[inline]
    pub fn query(&self, key: u64) -> bool {
        self.positions(key)
            .all(|bit| self.words[(bit >> 6) as usize] & (1 << (bit & 63)) != 0)
    }

    /// Estimate for the current fill.
    pub fn fpp(&self) -> f64 {
        bf_fpp(self.k, self.inserted, self.m)
    }
}
