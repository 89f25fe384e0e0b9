use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use super::procrustes::ActModel;
use crate::corpus::QueryVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Valence,
    Arousal,
    Tension,
}

impl Dimension {
    pub const ALL: [Dimension; 3] = [Dimension::Valence, Dimension::Arousal, Dimension::Tension];

    /// Unit direction of the dimension in the aligned space. Tension points
    /// along (-1, 1, 0): negative valence, positive arousal.
    pub fn axis(self) -> Vector3<f64> {
        match self {
            Dimension::Valence => Vector3::x(),
            Dimension::Arousal => Vector3::y(),
            Dimension::Tension => Vector3::new(-1.0, 1.0, 0.0) / 2f64.sqrt(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Valence => "valence",
            Dimension::Arousal => "arousal",
            Dimension::Tension => "tension",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "valence" => Ok(Dimension::Valence),
            "arousal" => Ok(Dimension::Arousal),
            "tension" => Ok(Dimension::Tension),
            other => Err(Error::Parameter(format!("unknown dimension `{other}`"))),
        }
    }
}

/// Weighted mean of the rows of `coords` (terms x dims), weights from `q`.
pub fn center_of_mass(coords: &DMatrix<f64>, q: &QueryVector) -> Result<DVector<f64>> {
    q.check_dim(coords.nrows())?;
    q.require_nonnegative()?;
    let total = q.total();
    if q.is_empty() || total.is_nan() || total <= 0.0 {
        return Err(Error::EmptyQuery);
    }
    let mut acc = DVector::zeros(coords.ncols());
    for &(i, w) in q.entries() {
        acc += coords.row(i).transpose() * w;
    }
    Ok(acc / total)
}

/// Center of mass of the query's terms in the aligned space.
pub fn project_track(act: &ActModel, q: &QueryVector) -> Result<Vector3<f64>> {
    let p = center_of_mass(&act.term_coords, q)?;
    Ok(Vector3::new(p[0], p[1], p[2]))
}

pub fn predict_dimension(position: &Vector3<f64>, dimension: Dimension) -> f64 {
    match dimension {
        Dimension::Valence => position[0],
        Dimension::Arousal => position[1],
        Dimension::Tension => (position[1] - position[0]) / 2f64.sqrt(),
    }
}

/// Projection of `position` onto the unit direction of `term`.
pub fn predict_term(act: &ActModel, position: &Vector3<f64>, term: &str) -> Result<f64> {
    let i = act
        .term_index(term)
        .ok_or_else(|| Error::UnknownTerm(term.to_string()))?;
    predict_term_at(act, position, i)
}

pub fn predict_term_at(act: &ActModel, position: &Vector3<f64>, i: usize) -> Result<f64> {
    let x = act.term_position(i);
    let norm = x.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateTerm(act.terms[i].clone()));
    }
    Ok(x.dot(position) / norm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionProxy {
    pub dimension: Dimension,
    pub term: String,
    pub angle_deg: f64,
    pub prevalence: usize,
}

/// For each dimension, the sufficiently prevalent term whose aligned
/// position makes the smallest angle with the dimension axis. Ties go to
/// the more prevalent term, then to the lexicographically smaller one.
pub fn select_dimension_proxy(
    act: &ActModel,
    prevalence: &[usize],
    num_tracks: usize,
    min_share: f64,
) -> Result<Vec<DimensionProxy>> {
    if prevalence.len() != act.terms.len() {
        return Err(Error::Parameter(
            "prevalence list length differs from model terms".into(),
        ));
    }
    let threshold = min_share * num_tracks as f64;
    let candidates: Vec<usize> = (0..act.terms.len())
        .filter(|&i| prevalence[i] as f64 >= threshold && act.term_position(i).norm() > 0.0)
        .collect();
    if candidates.is_empty() {
        return Err(Error::EmptyCandidate);
    }
    let mut out = Vec::with_capacity(3);
    for dim in Dimension::ALL {
        let axis = dim.axis();
        let angle = |i: usize| {
            let x = act.term_position(i);
            (x.dot(&axis) / x.norm()).clamp(-1.0, 1.0).acos().to_degrees()
        };
        let best = candidates
            .iter()
            .copied()
            .min_by(|&a, &b| {
                angle(a)
                    .total_cmp(&angle(b))
                    .then(prevalence[b].cmp(&prevalence[a]))
                    .then(act.terms[a].cmp(&act.terms[b]))
            })
            .expect("non-empty candidates");
        out.push(DimensionProxy {
            dimension: dim,
            term: act.terms[best].clone(),
            angle_deg: angle(best),
            prevalence: prevalence[best],
        });
    }
    Ok(out)
}
