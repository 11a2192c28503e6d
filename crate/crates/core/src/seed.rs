//! Seed derivation for independent random streams.
//!
//! Every unit of seeded work (a run, a calibration capture, a training day,
//! an annealing chain) gets its own RNG whose seed is derived from a base
//! seed and a stream index. The derivation is the splitmix64 generator:
//! `derive_seed(base, k)` is the `k`-th output (0-based) of a splitmix64
//! sequence started at state `base`, i.e. the finalizer applied to
//! `base + (k + 1) * 0x9E3779B97F4A7C15` with wrapping arithmetic.
//!
//! The mapping is part of the file-level reproducibility contract and must
//! not change.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 output finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base.wrapping_add(stream.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}
