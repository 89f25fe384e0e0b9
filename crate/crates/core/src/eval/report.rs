use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ratings::RatingsTable;
use super::spearman::spearman_rho;
use crate::{Error, Result};

/// scale -> track id -> predicted value
pub type Predictions = BTreeMap<String, BTreeMap<String, f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scale: String,
    pub method: String,
    pub k: Option<usize>,
    pub rho: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PredictionReport {
    pub rows: Vec<ReportRow>,
    /// seeds, variant and other settings of the producing run
    pub metadata: BTreeMap<String, String>,
}

impl PredictionReport {
    pub const HEADER: &'static str = "scale\tmethod\tk\trho\tn";

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(Self::HEADER);
        out.push('\n');
        for r in &self.rows {
            let k = r.k.map(|k| k.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", r.scale, r.method, k, r.rho, r.n);
        }
        out
    }
}

/// Correlates predictions with the mean ratings of every predicted scale.
pub fn evaluate_predictions(
    predictions: &Predictions,
    ratings: &RatingsTable,
    method: &str,
    k: Option<usize>,
) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for (scale, predicted) in predictions {
        let observed = ratings.aggregated(scale);
        let (mut x, mut y) = (Vec::new(), Vec::new());
        if let Some(observed) = observed {
            for (track, p) in predicted {
                if let Some(o) = observed.get(track) {
                    x.push(*p);
                    y.push(*o);
                }
            }
        }
        if x.len() < 3 {
            return Err(Error::Coverage {
                scale: scale.clone(),
                n: x.len(),
            });
        }
        rows.push(ReportRow {
            scale: scale.clone(),
            method: method.to_string(),
            k,
            rho: spearman_rho(&x, &y)?,
            n: x.len(),
        });
    }
    Ok(rows)
}
