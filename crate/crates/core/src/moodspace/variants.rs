use std::fmt;
use std::str::FromStr;

use super::mds::{mds_embed, MdsOptions};
use super::procrustes::{procrustes_align, procrustes_fit, ActModel};
use super::reference::ReferenceSpace;
use crate::corpus::TermDocMatrix;
use crate::factorize::{svd_fit, term_dissimilarity};
use crate::linalg::cosine_dissimilarity;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActVariant {
    /// truncated SVD -> cosine dissimilarity -> non-metric MDS -> Procrustes
    Standard,
    /// Procrustes directly on the rank-3 SVD term coordinates
    SvdOnly,
    /// non-metric MDS on cosine dissimilarities of the raw TF-IDF rows
    MdsOnly,
}

impl ActVariant {
    pub fn name(self) -> &'static str {
        match self {
            ActVariant::Standard => "standard",
            ActVariant::SvdOnly => "svd-only",
            ActVariant::MdsOnly => "mds-only",
        }
    }
}

impl fmt::Display for ActVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(ActVariant::Standard),
            "svd-only" | "svd_only" => Ok(ActVariant::SvdOnly),
            "mds-only" | "mds_only" => Ok(ActVariant::MdsOnly),
            other => Err(Error::Parameter(format!("unknown act variant `{other}`"))),
        }
    }
}

/// Fits an ACT model. `k` is the SVD rank of the standard variant; the
/// SVD-only variant always uses rank 3 and the MDS-only variant ignores it.
pub fn act_variants(
    matrix: &TermDocMatrix,
    reference: &ReferenceSpace,
    variant: ActVariant,
    k: usize,
    mds: &MdsOptions,
) -> Result<ActModel> {
    let terms = matrix.terms();
    let (mut act, rank) = match variant {
        ActVariant::Standard => {
            let svd = svd_fit(matrix, k)?;
            let dissim = term_dissimilarity(&svd)?;
            let embedding = mds_embed(&dissim, terms, mds)?;
            (procrustes_fit(&embedding, reference)?, Some(k))
        }
        ActVariant::SvdOnly => {
            let svd = svd_fit(matrix, 3)?;
            (procrustes_align(terms, &svd.term_coordinates(), reference)?, Some(3))
        }
        ActVariant::MdsOnly => {
            let dissim =
                cosine_dissimilarity(&matrix.to_dense()).map_err(|i| Error::DegenerateTerm(terms[i].clone()))?;
            let embedding = mds_embed(&dissim, terms, mds)?;
            (procrustes_fit(&embedding, reference)?, None)
        }
    };
    act.provenance.variant = variant.name().to_string();
    act.provenance.k = rank;
    if variant != ActVariant::SvdOnly {
        act.provenance.seed = Some(mds.seed);
    }
    Ok(act)
}
