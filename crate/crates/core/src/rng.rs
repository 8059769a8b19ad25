//! Seeded randomness.
//!
//! Every stochastic routine draws from ChaCha20 (`rand_chacha` 0.3), seeded
//! from a 64-bit seed and split into independent streams by purpose. The
//! generator is counter-based and platform independent, so a seed fully
//! determines every transcript and report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::field::{Field, FieldMatrix};

/// Name of the generator, recorded in transcripts.
pub const GENERATOR: &str = "chacha20/rand_chacha-0.3/v1";

/// Purpose-separated streams derived from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Files = 1,
    Query = 2,
    Mask = 3,
    Byzantine = 4,
    Audit = 5,
}

pub fn stream(seed: u64, purpose: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}

/// Seed for trial `index` of a run seeded with `seed` (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn element<R: Rng + ?Sized>(rng: &mut R, field: Field) -> u64 {
    rng.gen_range(0..field.modulus())
}

pub fn nonzero_element<R: Rng + ?Sized>(rng: &mut R, field: Field) -> u64 {
    rng.gen_range(1..field.modulus())
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, field: Field, len: usize) -> Vec<u64> {
    (0..len).map(|_| element(rng, field)).collect()
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, field: Field, rows: usize, cols: usize) -> FieldMatrix {
    FieldMatrix::from_fn(field, rows, cols, |_, _| element(rng, field))
}
