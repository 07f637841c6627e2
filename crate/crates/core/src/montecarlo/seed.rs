use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default master seed ("ELO" in ASCII).
pub const DEFAULT_SEED: u64 = 0x454C4F;

/// SplitMix64 finaliser: a well-mixed 64-bit seed for sub-experiment `tag`.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut z = master ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The random stream of chain `index` under `master`: one ChaCha key per master
/// seed, one stream per chain.
pub fn chain_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}
