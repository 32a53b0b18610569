//! Matrix completion over the tropical (max,+) semiring.
//!
//! The crate factorizes a partially observed matrix `R` as `U ⊗ V`, where
//! `⊗` is the max-plus product, by residuated solving of tropical linear
//! systems with missing entries skipped. A masked non-negative matrix
//! factorization (multiplicative updates, NNDSVD initialization) is included
//! as the comparison baseline, together with the evaluation toolkit used by
//! the benchmark harness: RMSE over train/test splits, distance correlation,
//! per-row Pearson/Spearman, centered row norms, silhouette score, synthetic
//! (max,+) data generation, masking, log transform, Ward feature
//! agglomeration, and CSV/JSON serialization.

pub mod csv;
pub mod datagen;
pub mod error;
pub mod matrix;
pub mod metrics;
pub mod nmf;
pub mod solver;
pub mod stmf;
pub mod svd;
pub mod tropical;

pub use error::{Error, Result};
pub use matrix::{Mask, Matrix, MaskedMatrix, Permutation};

/// Deterministic sub-seed derivation so independent random streams (column
/// ordering, initialization, mask splitting) cannot perturb each other.
pub mod seeding {
    /// splitmix64 finalizer over `seed` xor a stream tag.
    pub fn derive_seed(seed: u64, stream: u64) -> u64 {
        let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

}
