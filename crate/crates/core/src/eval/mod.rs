//! Scoring predictions against listener ratings.

mod ablation;
mod ratings;
mod report;
mod spearman;
mod targets;

pub use ablation::{
    ablate_sparsity, remove_one, AblationLevel, AblationReport, AblationRow, TestTrack, ABLATION_LEVELS,
};
pub use ratings::{cronbach_alpha, Rating, RatingsTable, LIKERT_MAX, LIKERT_MIN};
pub use report::{evaluate_predictions, PredictionReport, Predictions, ReportRow};
pub use spearman::{average_ranks, spearman_rho};
pub use targets::{act_scale_value, resolve_scale, ScaleTarget};
