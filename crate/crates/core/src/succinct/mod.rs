//! Compact building blocks: rank/select bitmaps, packed integer arrays,
//! Directly Addressable Codes, and permutations with a sampled inverse.

pub mod bitvec;
pub mod dac;
pub mod ints;
pub mod perm;

pub use bitvec::{BitVector, BitVectorBuilder};
pub use dac::{DacConfig, DacSequence};
pub use ints::PackedInts;
pub use perm::{Permutation, DEFAULT_SAMPLE_RATE};
