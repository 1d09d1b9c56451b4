//! Counter-based random streams.
//!
//! A stream is addressed by `(master_seed, stream_index)` and backed by a
//! ChaCha8 generator whose key is derived from the seed and whose stream id
//! is the index. Any replication can therefore be regenerated on its own, on
//! any thread, in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The generator type handed out by [`RngState::generator`].
pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngState {
    pub master_seed: u64,
    pub stream_index: u64,
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngState {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngState {
            master_seed,
            stream_index,
        }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn generator(&self) -> StreamRng {
        let mut sm = self.master_seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut sm).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream_index);
        rng
    }

    /// Child stream `index` of this stream, e.g. one resample of one
    /// replication. Children of distinct parents use distinct keys.
    pub fn substream(&self, index: u64) -> RngState {
        let mut sm = self.master_seed ^ 0xA076_1D64_78BD_642F;
        let a = splitmix64(&mut sm);
        let mut sm2 = a ^ self.stream_index.rotate_left(32);
        let child_seed = splitmix64(&mut sm2) ^ splitmix64(&mut sm2).rotate_left(17);
        RngState::new(child_seed, index)
    }
}

pub fn rng_stream(master_seed: u64, stream_index: u64) -> RngState {
    RngState::new(master_seed, stream_index)
}
