use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream selectors keep the generators of independent subsystems apart even
/// when callers reuse one seed everywhere.
pub(crate) mod stream {
    pub const INIT: u64 = 1;
    pub const SHUFFLE: u64 = 2;
    pub const DEGRADE: u64 = 3;
    pub const RESYNTH_BASE: u64 = 1 << 32;
}

pub(crate) fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed ^ mix(stream)))
}

/// SplitMix64 finalizer, used to decorrelate derived seeds.
pub(crate) fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
