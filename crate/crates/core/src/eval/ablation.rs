use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ratings::RatingsTable;
use super::report::{evaluate_predictions, Predictions};
use super::targets::{act_scale_value, resolve_scale, ScaleTarget};
use crate::corpus::TermDocMatrix;
use crate::moodspace::{project_track, ActModel};
use crate::{derive_seed, Error, Result};

/// A held-out track with its raw matched counts, `(term index, count)` over
/// the training matrix's terms.
#[derive(Debug, Clone, PartialEq)]
pub struct TestTrack {
    pub track_id: String,
    pub associations: Vec<(usize, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AblationLevel {
    /// the untouched test set
    Full,
    /// first state whose mean terms-per-track is at most this value
    Mean(usize),
}

impl fmt::Display for AblationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AblationLevel::Full => f.write_str("full"),
            AblationLevel::Mean(l) => write!(f, "{l}"),
        }
    }
}

pub const ABLATION_LEVELS: [usize; 8] = [8, 7, 6, 5, 4, 3, 2, 1];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub level: AblationLevel,
    pub scale: String,
    /// median across models of the run-averaged rho
    pub rho_median: f64,
    pub runs: usize,
    /// run-averaged rho per model, keyed by the model's rank
    pub rho_by_model: Vec<(Option<usize>, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AblationReport {
    pub rows: Vec<AblationRow>,
    pub metadata: BTreeMap<String, String>,
}

impl AblationReport {
    pub const HEADER: &'static str = "level\tscale\trho_median\truns";

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(Self::HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", r.level, r.scale, r.rho_median, r.runs);
        }
        out
    }

    pub fn rho(&self, level: AblationLevel, scale: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.level == level && r.scale == scale)
            .map(|r| r.rho_median)
    }
}

struct Setup<'a> {
    matrix: &'a TermDocMatrix,
    models: &'a [ActModel],
    ratings: &'a RatingsTable,
    scales: Vec<(String, ScaleTarget)>,
}

impl Setup<'_> {
    /// rho per model, then per scale
    fn evaluate(&self, ids: &[&str], state: &[Vec<(usize, u32)>]) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(self.models.len());
        for act in self.models {
            let mut predictions = Predictions::new();
            for (id, assoc) in ids.iter().zip(state) {
                let q = self.matrix.query_from_counts(assoc)?;
                let pos = project_track(act, &q)?;
                for (name, target) in &self.scales {
                    predictions
                        .entry(name.clone())
                        .or_default()
                        .insert(id.to_string(), act_scale_value(act, &pos, *target)?);
                }
            }
            let rows = evaluate_predictions(&predictions, self.ratings, "act", act.provenance.k)?;
            out.push(rows.into_iter().map(|r| r.rho).collect());
        }
        Ok(out)
    }

    /// One ablation run; returns rho per level (Full first), model and scale.
    fn run(&self, tracks: &[TestTrack], seed: u64) -> Result<Vec<(AblationLevel, Vec<Vec<f64>>)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ids: Vec<&str> = tracks.iter().map(|t| t.track_id.as_str()).collect();
        let mut state: Vec<Vec<(usize, u32)>> = tracks.iter().map(|t| t.associations.clone()).collect();
        let n_tracks = state.len();
        let mut total: usize = state.iter().map(Vec::len).sum();

        let full = self.evaluate(&ids, &state)?;
        let mut out = vec![(AblationLevel::Full, full.clone())];
        let mut pending: Vec<usize> = Vec::new();
        for level in ABLATION_LEVELS {
            if total <= level * n_tracks {
                out.push((AblationLevel::Mean(level), full.clone()));
            } else {
                pending.push(level);
            }
        }
        while !pending.is_empty() {
            remove_one(&mut state, &mut rng).ok_or(Error::NothingToAblate)?;
            total -= 1;
            while let Some(&level) = pending.first() {
                if total > level * n_tracks {
                    break;
                }
                pending.remove(0);
                out.push((AblationLevel::Mean(level), self.evaluate(&ids, &state)?));
            }
        }
        Ok(out)
    }
}

/// Removes one association in place and returns `(track, removed)`.
///
/// The track is drawn with probability proportional to its number of
/// associations among tracks that have at least two; the association within
/// it with probability proportional to `1 / max(count, 1)`. Returns `None`
/// when every track is down to a single association.
pub fn remove_one<R: Rng + ?Sized>(state: &mut [Vec<(usize, u32)>], rng: &mut R) -> Option<(usize, (usize, u32))> {
    let weights: Vec<f64> = state
        .iter()
        .map(|a| if a.len() >= 2 { a.len() as f64 } else { 0.0 })
        .collect();
    let track = WeightedIndex::new(&weights).ok()?.sample(rng);
    let inverse: Vec<f64> = state[track].iter().map(|&(_, c)| 1.0 / f64::from(c.max(1))).collect();
    let pick = WeightedIndex::new(&inverse).ok()?.sample(rng);
    Some((track, state[track].remove(pick)))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Removes test associations one at a time and records how prediction
/// quality degrades as the mean number of terms per track falls through
/// 8, 7, ..., 1.
///
/// Each step picks a track with probability proportional to its number of
/// associations (tracks with a single association are never touched), then
/// one of its associations with probability proportional to `1 / count`.
pub fn ablate_sparsity(
    tracks: &[TestTrack],
    matrix: &TermDocMatrix,
    models: &[ActModel],
    ratings: &RatingsTable,
    runs: usize,
    seed: u64,
) -> Result<AblationReport> {
    if models.is_empty() || runs == 0 {
        return Err(Error::Parameter("ablation needs at least one model and one run".into()));
    }
    if let Some(m) = models.iter().find(|m| m.terms != matrix.terms()) {
        return Err(Error::Parameter(format!(
            "model (k={:?}) terms differ from the matrix terms",
            m.provenance.k
        )));
    }
    if let Some(t) = tracks.iter().find(|t| t.associations.is_empty()) {
        return Err(Error::Parameter(format!(
            "test track `{}` has no associations",
            t.track_id
        )));
    }
    if tracks.iter().all(|t| t.associations.len() <= 1) {
        return Err(Error::NothingToAblate);
    }
    let scales: Vec<(String, ScaleTarget)> = ratings
        .scales()
        .iter()
        .filter_map(|s| resolve_scale(s, matrix.terms()).map(|t| (s.clone(), t)))
        .collect();
    if scales.is_empty() {
        return Err(Error::Parameter(
            "no rating scale names a dimension or model term".into(),
        ));
    }
    let setup = Setup {
        matrix,
        models,
        ratings,
        scales,
    };
    let per_run = (0..runs)
        .into_par_iter()
        .map(|r| setup.run(tracks, derive_seed(seed, r as u64)))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let levels: Vec<AblationLevel> = per_run[0].iter().map(|(l, _)| *l).collect();
    let mut order = vec![AblationLevel::Full];
    order.extend(ABLATION_LEVELS.iter().map(|&l| AblationLevel::Mean(l)));
    for level in order.into_iter().filter(|l| levels.contains(l)) {
        for (s, (scale, _)) in setup.scales.iter().enumerate() {
            let mut by_model = Vec::with_capacity(models.len());
            for (m, act) in models.iter().enumerate() {
                let mut sum = 0.0;
                for run in &per_run {
                    let (_, values) = run
                        .iter()
                        .find(|(l, _)| *l == level)
                        .expect("every run records each level");
                    sum += values[m][s];
                }
                by_model.push((act.provenance.k, sum / runs as f64));
            }
            let mut values: Vec<f64> = by_model.iter().map(|v| v.1).collect();
            rows.push(AblationRow {
                level,
                scale: scale.clone(),
                rho_median: median(&mut values),
                runs,
                rho_by_model: by_model,
            });
        }
    }
    Ok(AblationReport {
        rows,
        metadata: BTreeMap::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn level_labels() {
        assert_eq!(AblationLevel::Full.to_string(), "full");
        assert_eq!(AblationLevel::Mean(3).to_string(), "3");
    }
}
