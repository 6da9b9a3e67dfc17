//! Counter-keyed random streams.
//!
//! Every draw comes from a ChaCha generator whose key is `(seed, slot, stream)`,
//! so the randomness consumed in one slot or stream never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Instance = 1,
    Arrival = 2,
    Demand = 3,
    Cost = 4,
    Decision = 5,
}

pub fn keyed_rng(seed: u64, slot: u64, stream: Stream) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&slot.to_le_bytes());
    key[16..24].copy_from_slice(&(stream as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
