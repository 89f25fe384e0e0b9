//! The mood space: non-metric MDS of term dissimilarities, Procrustes
//! alignment to a valence/arousal reference, and track/term predictions.

mod isotonic;
mod mds;
mod predict;
mod procrustes;
mod reference;
mod variants;

pub use isotonic::isotonic_fit;
pub use mds::{mds_embed, MdsEmbedding, MdsOptions};
pub use predict::{
    center_of_mass, predict_dimension, predict_term, predict_term_at, project_track, select_dimension_proxy, Dimension,
    DimensionProxy,
};
pub use procrustes::{procrustes_align, procrustes_fit, ActModel, MatchedTerm, Provenance};
pub use reference::ReferenceSpace;
pub use variants::{act_variants, ActVariant};
