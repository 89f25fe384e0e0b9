//! Affective Circumplex Transformation (ACT) toolkit.
//!
//! The pipeline turns a tag/track corpus into a three-dimensional mood space:
//!
//! 1. [`corpus`] matches free-text social tags against a controlled vocabulary
//!    and builds a TF-IDF term-document matrix.
//! 2. [`factorize`] fits low-rank semantic models (truncated SVD, NMF, PLSA)
//!    and folds unseen tracks into them.
//! 3. [`moodspace`] embeds term dissimilarities in 3-D with non-metric MDS,
//!    aligns the embedding to a valence/arousal reference with Procrustes
//!    analysis, and predicts dimensional and term-level moods for tracks.
//! 4. [`clusterability`] measures clustering tendency with Hopkins' index.
//! 5. [`eval`] scores predictions against listener ratings with Spearman's
//!    rho, checks rater consistency and runs the tag-sparsity ablation.
//!
//! [`cli`] wires everything into the `act` batch tool.

pub mod cli;
pub mod clusterability;
pub mod corpus;
mod error;
pub mod eval;
pub mod factorize;
pub mod linalg;
pub mod moodspace;
pub mod synthetic;
mod tsv;

pub use error::{Error, Result};

/// Format version written into every JSON artifact.
pub const FORMAT_VERSION: u32 = 1;

/// Independent child seed for the `index`-th sub-task of a seeded job
/// (SplitMix64 finalizer over the pair).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
