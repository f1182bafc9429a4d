//! Splittable, counter-based random streams.
//!
//! A stream is identified by a master seed and a path of child indices.
//! The path is hashed into a 256-bit ChaCha key, so the keystream of a
//! handle depends only on `(master_seed, stream_path)` and never on which
//! thread, or in which order, it is consumed.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The generator every sampler draws from.
pub type StreamRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngHandle {
    master_seed: u64,
    stream_path: Vec<u64>,
}

impl RngHandle {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            stream_path: Vec::new(),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_path(&self) -> &[u64] {
        &self.stream_path
    }

    /// Handle for the `index`-th substream below this one.
    pub fn child(&self, index: u64) -> Self {
        let mut stream_path = Vec::with_capacity(self.stream_path.len() + 1);
        stream_path.extend_from_slice(&self.stream_path);
        stream_path.push(index);
        Self {
            master_seed: self.master_seed,
            stream_path,
        }
    }

    /// Named substream; the label is hashed into a child index.
    pub fn named(&self, label: &str) -> Self {
        let h = label
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325_u64, |h, b| {
                (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
            });
        self.child(h)
    }

    fn key(&self) -> [u8; 32] {
        // Length is mixed in so that a path and its zero-padded extension differ.
        let mut state = splitmix64(self.master_seed ^ 0x5eed_0f_5eed);
        state = splitmix64(state ^ (self.stream_path.len() as u64).wrapping_mul(GOLDEN));
        for &step in &self.stream_path {
            state = splitmix64(state ^ splitmix64(step.wrapping_add(0x51ab_1e5e)));
        }
        let mut key = [0u8; 32];
        for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
            let word = splitmix64(state.wrapping_add((i as u64 + 1).wrapping_mul(GOLDEN)));
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        key
    }

    /// Fresh generator positioned at the start of this handle's stream.
    pub fn stream(&self) -> StreamRng {
        ChaCha8Rng::from_seed(self.key())
    }
}

impl fmt::Display for RngHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.master_seed)?;
        for step in &self.stream_path {
            write!(f, "/{step}")?;
        }
        Ok(())
    }
}
