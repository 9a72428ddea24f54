//! Reproducible per-task random streams.
//!
//! Every experiment takes one global seed. Task `i` runs on its own ChaCha8
//! stream seeded with `derive_seed(global, i)`, so results do not depend on
//! scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a task index into a global seed.
pub fn derive_seed(global: u64, task: u64) -> u64 {
    splitmix64(global ^ splitmix64(task))
}

pub fn task_rng(global: u64, task: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(global, task))
}
