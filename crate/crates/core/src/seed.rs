//! Deterministic derivation of independent random sub-streams.
//!
//! Every random draw in a sweep is traced back to the master seed through
//! [`derive`], keyed by (trial index, purpose, ...). Any single trial can
//! therefore be replayed in isolation, and trials can run in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags separating streams that share the same indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Topology = 0x746f_706f,
    Channel = 0x6368_616e,
    LinkFading = 0x6661_6465,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `seed` with a sequence of keys into a new 64-bit seed.
pub fn derive(seed: u64, purpose: Purpose, keys: &[u64]) -> u64 {
    let mut h = splitmix64(seed ^ splitmix64(purpose as u64));
    for &k in keys {
        h = splitmix64(h ^ splitmix64(k.wrapping_add(0x632b_e59b_d9b4_e019)));
    }
    h
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn topology_seed(master: u64, topology_index: u64) -> u64 {
    derive(master, Purpose::Topology, &[topology_index])
}

pub fn channel_seed(master: u64, topology_index: u64, draw_index: u64) -> u64 {
    derive(master, Purpose::Channel, &[topology_index, draw_index])
}
