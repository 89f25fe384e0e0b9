use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use nalgebra::DMatrix;

use crate::{tsv, Error, Result};

pub const LIKERT_MIN: f64 = 1.0;
pub const LIKERT_MAX: f64 = 9.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Rating {
    pub track_id: String,
    pub rater_id: String,
    pub scale: String,
    pub value: f64,
}

/// Listener ratings on nine-step scales, with per-track means.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingsTable {
    scales: Vec<String>,
    rows: Vec<Rating>,
    /// scale -> track -> mean over raters
    aggregated: BTreeMap<String, BTreeMap<String, f64>>,
}

impl RatingsTable {
    pub fn new(rows: Vec<Rating>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut sums: BTreeMap<String, BTreeMap<String, (f64, usize)>> = BTreeMap::new();
        for r in &rows {
            if !(LIKERT_MIN..=LIKERT_MAX).contains(&r.value) {
                return Err(Error::Config(format!(
                    "rating {} for `{}` outside [1, 9]",
                    r.value, r.track_id
                )));
            }
            if !seen.insert((&r.track_id, &r.rater_id, &r.scale)) {
                return Err(Error::Config(format!(
                    "duplicate rating of `{}` by `{}` on `{}`",
                    r.track_id, r.rater_id, r.scale
                )));
            }
            let e = sums
                .entry(r.scale.clone())
                .or_default()
                .entry(r.track_id.clone())
                .or_insert((0.0, 0));
            e.0 += r.value;
            e.1 += 1;
        }
        let aggregated = sums
            .into_iter()
            .map(|(s, tracks)| (s, tracks.into_iter().map(|(t, (sum, n))| (t, sum / n as f64)).collect()))
            .collect::<BTreeMap<_, _>>();
        Ok(RatingsTable {
            scales: aggregated.keys().cloned().collect(),
            rows,
            aggregated,
        })
    }

    /// Reads `track_id<TAB>rater_id<TAB>scale<TAB>value`.
    pub fn from_tsv_str(source: &str, text: &str) -> Result<Self> {
        let records = tsv::parse(source, text, &["track_id", "rater_id", "scale", "value"])?;
        let mut rows = Vec::with_capacity(records.len());
        for r in &records {
            rows.push(Rating {
                track_id: r.fields[0].trim().to_string(),
                rater_id: r.fields[1].trim().to_string(),
                scale: r.fields[2].trim().to_string(),
                value: tsv::field(source, r, 3, "value")?,
            });
        }
        Self::new(rows).map_err(|e| Error::Parse {
            path: source.into(),
            line: 0,
            msg: e.to_string(),
        })
    }

    pub fn from_tsv_path(path: &Path) -> Result<Self> {
        let text = tsv::read_file(path)?;
        Self::from_tsv_str(&path.display().to_string(), &text)
    }

    pub fn scales(&self) -> &[String] {
        &self.scales
    }

    pub fn rows(&self) -> &[Rating] {
        &self.rows
    }

    /// Track means for one scale.
    pub fn aggregated(&self, scale: &str) -> Option<&BTreeMap<String, f64>> {
        self.aggregated.get(scale)
    }

    /// Raters x tracks matrix of one scale restricted to raters who rated
    /// every track of that scale.
    pub fn complete_matrix(&self, scale: &str) -> Result<DMatrix<f64>> {
        let tracks: Vec<&String> = self
            .aggregated
            .get(scale)
            .ok_or_else(|| Error::Parameter(format!("unknown scale `{scale}`")))?
            .keys()
            .collect();
        let mut by_rater: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
        for r in self.rows.iter().filter(|r| r.scale == scale) {
            by_rater.entry(&r.rater_id).or_default().insert(&r.track_id, r.value);
        }
        let complete: Vec<&BTreeMap<&str, f64>> = by_rater.values().filter(|m| m.len() == tracks.len()).collect();
        Ok(DMatrix::from_fn(complete.len(), tracks.len(), |r, c| {
            complete[r][tracks[c].as_str()]
        }))
    }
}

/// Cronbach's alpha with raters as test parts and tracks as cases.
pub fn cronbach_alpha(ratings: &DMatrix<f64>) -> Result<f64> {
    let (raters, items) = ratings.shape();
    if raters < 2 || items < 2 {
        return Err(Error::Parameter(format!(
            "cronbach alpha needs at least 2 raters and 2 items, got {raters} x {items}"
        )));
    }
    let variance = |v: &mut dyn Iterator<Item = f64>| -> f64 {
        let v: Vec<f64> = v.collect();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    };
    let part_var: f64 = (0..raters).map(|r| variance(&mut ratings.row(r).iter().copied())).sum();
    let total_var = variance(&mut (0..items).map(|c| ratings.column(c).sum()));
    if total_var == 0.0 {
        return Err(Error::UndefinedAlpha("rater sums have zero variance".into()));
    }
    let k = raters as f64;
    Ok(k / (k - 1.0) * (1.0 - part_var / total_var))
}
