//! Low-rank semantic models of the term-document matrix: truncated SVD,
//! nonnegative matrix factorization and probabilistic latent semantic
//! analysis, with fold-in of unseen tracks.

mod nmf;
mod plsa;
mod svd;

use serde::{Deserialize, Serialize};

pub use nmf::{nmf_fit, nmf_predict_weights, NmfModel};
pub use plsa::{plsa_fit, plsa_predict_weights, PlsaModel};
pub use svd::{svd_fit, svd_predict_weights, term_dissimilarity, SvdModel};

use crate::corpus::QueryVector;
use crate::{Error, Result, FORMAT_VERSION};

/// Floor applied to every denominator of the multiplicative and EM updates.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Parameters of an iterative fit (NMF, PLSA).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub k: usize,
    pub max_iter: usize,
    /// Stop once the relative improvement of the objective falls below this.
    pub tol: f64,
    pub seed: u64,
}

impl FitOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        FitOptions {
            k,
            max_iter: 200,
            tol: 1e-6,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Parameter("rank must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::Parameter("tolerance must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldInOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for FoldInOptions {
    fn default() -> Self {
        FoldInOptions {
            max_iter: 50,
            tol: 1e-6,
        }
    }
}

/// Any fitted semantic model, tagged by `model_type` when serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model_type", rename_all = "lowercase")]
pub enum SemanticModel {
    Svd(SvdModel),
    Nmf(NmfModel),
    Plsa(PlsaModel),
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    version: u32,
    #[serde(flatten)]
    model: SemanticModel,
}

impl SemanticModel {
    pub fn terms(&self) -> &[String] {
        match self {
            SemanticModel::Svd(m) => &m.terms,
            SemanticModel::Nmf(m) => &m.terms,
            SemanticModel::Plsa(m) => &m.terms,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            SemanticModel::Svd(m) => m.k,
            SemanticModel::Nmf(m) => m.k,
            SemanticModel::Plsa(m) => m.k,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SemanticModel::Svd(_) => "svd",
            SemanticModel::Nmf(_) => "nmf",
            SemanticModel::Plsa(_) => "plsa",
        }
    }

    /// Weight of every model term for the query.
    pub fn predict_weights(&self, q: &QueryVector, fold_in: &FoldInOptions) -> Result<Vec<f64>> {
        match self {
            SemanticModel::Svd(m) => svd_predict_weights(m, q),
            SemanticModel::Nmf(m) => nmf_predict_weights(m, q, fold_in),
            SemanticModel::Plsa(m) => plsa_predict_weights(m, q, fold_in),
        }
    }

    pub fn to_json_value(&self) -> Result<serde_json::Value> {
        serde_json::to_value(ModelDoc {
            version: FORMAT_VERSION,
            model: self.clone(),
        })
        .map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_json_value(value)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let doc: ModelDoc = serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))?;
        if doc.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported model version {}", doc.version)));
        }
        Ok(doc.model)
    }
}
