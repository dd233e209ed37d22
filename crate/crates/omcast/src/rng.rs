//! Deterministic random-stream derivation.
//!
//! Every stochastic quantity in the simulator (fading taps, traffic offsets,
//! SNR assignments, optional random backoff) is drawn from its own ChaCha8
//! stream whose 256-bit seed is derived from the master seed plus a small
//! tuple of integer tags. Streams are therefore independent of evaluation
//! order: redrawing the channel for (user 3, epoch 17) always yields the
//! same matrix no matter what was drawn before it.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags, kept distinct so that no two subsystems can collide even if
/// they share the remaining tag values.
pub mod stream {
    pub const TRAFFIC: u64 = 0x01;
    pub const SNR: u64 = 0x02;
    pub const CHANNEL: u64 = 0x03;
    pub const BACKOFF: u64 = 0x04;
    pub const SESSION: u64 = 0x05;
}

/// SplitMix64 finalizer; full-period mixer with good avalanche behavior.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent ChaCha8 stream from a master seed and tag tuple.
pub fn substream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = master ^ 0xA076_1D64_78BD_642F;
    let mut seed = [0u8; 32];
    for &t in tags {
        state ^= splitmix64(&mut state) ^ t.wrapping_mul(0xE703_7ED1_A0B4_28DB);
    }
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Derives the per-session master seed from the experiment seed.
pub fn session_master(experiment_seed: u64, session: u64) -> u64 {
    let mut state = experiment_seed;
    let a = splitmix64(&mut state);
    let mut state2 = a ^ session.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    splitmix64(&mut state2)
}
