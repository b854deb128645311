//! Fixed-memory sketches for the low-memory partitioners.

mod bloom;
mod minhash;

pub use bloom::{bf_fpp, encode_key, BloomFilter};
pub use minhash::{minhash_part, MinHashFamily, MERSENNE_31};
