use nalgebra::Vector3;

use crate::moodspace::{predict_dimension, predict_term_at, ActModel, Dimension};
use crate::Result;

/// What a rating scale measures: a mood dimension or a single term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleTarget {
    Dimension(Dimension),
    /// index into the model's term list
    Term(usize),
}

/// Dimension names win over term names; unknown scales yield `None`.
pub fn resolve_scale(name: &str, terms: &[String]) -> Option<ScaleTarget> {
    if let Ok(d) = name.parse::<Dimension>() {
        return Some(ScaleTarget::Dimension(d));
    }
    let key = crate::corpus::normalize(name);
    terms.iter().position(|t| *t == key).map(ScaleTarget::Term)
}

pub fn act_scale_value(act: &ActModel, position: &Vector3<f64>, target: ScaleTarget) -> Result<f64> {
    match target {
        ScaleTarget::Dimension(d) => Ok(predict_dimension(position, d)),
        ScaleTarget::Term(i) => predict_term_at(act, position, i),
    }
}
