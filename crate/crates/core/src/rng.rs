//! Deterministic RNG substream derivation.
//!
//! Parallel sections (SMC particle moves, ABC particle moves) give each
//! unit of work its own stream derived from a base seed and integer tags,
//! so results are bit-identical for a fixed seed regardless of how the
//! work is scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout the crate.
pub type StreamRng = ChaCha8Rng;

// splitmix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream from a base seed and a list of tags
/// (e.g. `[target_index, particle_index]`).
pub fn substream(base: u64, tags: &[u64]) -> StreamRng {
    let mut state = mix(base ^ 0xA076_1D64_78BD_642F);
    for &t in tags {
        state = mix(state.wrapping_add(0x9E37_79B9_7F4A_7C15) ^ mix(t));
    }
    let mut seed = [0u8; 32];
    let mut s = state;
    for chunk in seed.chunks_mut(8) {
        s = s.wrapping_add(0x9E37_79B9_7F4A_7C15);
        chunk.copy_from_slice(&mix(s).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Fresh stream seed drawn from a parent RNG; used to detach an inner
/// parallel region from the caller's sequential stream.
pub fn child_seed(rng: &mut impl Rng) -> u64 {
    rng.random::<u64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let mut a = substream(42, &[1, 2]);
        let mut b = substream(42, &[1, 2]);
        let mut c = substream(42, &[2, 1]);
        let xa: u64 = a.random();
        assert_eq!(xa, b.random::<u64>());
        assert_ne!(xa, c.random::<u64>());
        assert_ne!(
            substream(42, &[0]).random::<u64>(),
            substream(43, &[0]).random::<u64>()
        );
    }
}
