//! Counter-based random streams.
//!
//! Every random draw in a simulation is addressed by `(seed, agent, step)`.
//! The stream for an address is a ChaCha8 keystream positioned at a fixed
//! offset, so a draw never depends on how many other draws happened before
//! it or on which thread produced them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Words of keystream reserved for a single `(agent, step)` cell.
const WORDS_PER_STEP_LOG2: u32 = 32;

/// Stream used for agent `agent`'s draw at step `step` of run `seed`.
pub fn step_stream(seed: u64, agent: usize, step: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(agent as u64);
    rng.set_word_pos((step as u128) << WORDS_PER_STEP_LOG2);
    rng
}

/// Stream used while constructing a problem instance. Kept on a stream id
/// that no agent index can reach.
pub fn construction_stream(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    rng
}
