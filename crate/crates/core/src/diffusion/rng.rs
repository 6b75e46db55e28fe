//! Random number streams.
//!
//! All randomness comes from [`Xoshiro256PlusPlus`]. A stream for sample `i`
//! of a run seeded with `s` is `Xoshiro256PlusPlus::seed_from_u64(sub_seed(s, i))`,
//! so every sample owns an independent stream no matter which worker draws it.

use rand::SeedableRng;
pub use rand_xoshiro::Xoshiro256PlusPlus;

pub type Prng = Xoshiro256PlusPlus;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th sample of a run seeded with `seed`.
#[inline]
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

pub fn stream(seed: u64) -> Prng {
    Prng::seed_from_u64(seed)
}

pub fn sample_stream(seed: u64, index: u64) -> Prng {
    Prng::seed_from_u64(sub_seed(seed, index))
}
