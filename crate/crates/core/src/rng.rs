//! Reproducible randomness.
//!
//! A run owns a single master seed from which every consumer derives its own
//! named sub-stream. Streams are independent ChaCha12 generators, so adding a
//! sensor or a road never shifts the draws seen by another one.

use alloc::string::String;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Seeded source of named, mutually independent random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derive the generator for a named sub-stream. The same (seed, name)
    /// pair always yields the same generator state.
    pub fn stream(&self, name: &str) -> ChaCha12Rng {
        let mut state = splitmix64(self.seed ^ fnv1a64(name.as_bytes()));
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        ChaCha12Rng::from_seed(key)
    }

    /// Convenience for `stream(&format!("{prefix}/{index}"))`.
    pub fn indexed_stream(&self, prefix: &str, index: usize) -> ChaCha12Rng {
        let mut name = String::from(prefix);
        name.push('/');
        let mut buf = [0u8; 20];
        let mut n = index;
        let mut i = buf.len();
        loop {
            i -= 1;
            buf[i] = b'0' + (n % 10) as u8;
            n /= 10;
            if n == 0 {
                break;
            }
        }
        for &b in &buf[i..] {
            name.push(b as char);
        }
        self.stream(&name)
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
